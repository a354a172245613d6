#include "adspiral/spiral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "adspiral/errors.hpp"
#include "adspiral/parallel.hpp"

namespace adspiral {

std::string to_string(StartBasis basis) { return basis == StartBasis::Neel ? "neel" : "flipped"; }

StartBasis start_basis_from_string(const std::string& name) {
  if (name == "neel") return StartBasis::Neel;
  if (name == "flipped") return StartBasis::Flipped;
  throw std::invalid_argument("unknown start basis '" + name + "' (expected neel or flipped)");
}

void SpiralConfig::validate() const {
  lattice.validate();
  schedule.validate();
  if (probe && probe->nsites() != lattice.nsites()) {
    throw std::invalid_argument("probe acts on " + std::to_string(probe->nsites()) + " sites, lattice has " +
                                std::to_string(lattice.nsites()));
  }
}

PauliSum SpiralConfig::resolved_probe() const { return probe ? *probe : heisenberg(lattice); }

ReferenceSpectrum ReferenceSpectrum::compute(const PauliSum& probe) {
  if (probe.nsites() > kMaxEigenSites) throw std::invalid_argument("probe too large for the dense eigensolver");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(probe));
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed");
  const auto& values = solver.eigenvalues();
  ReferenceSpectrum ref;
  ref.e0 = values[0];
  ref.e1 = values[values.size() - 1];
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] <= ref.e0 + kDegeneracyTol) {
      ref.ground_space.emplace_back(probe.nsites(), solver.eigenvectors().col(k));
    } else {
      ref.e1 = values[k];
      break;
    }
  }
  return ref;
}

double ReferenceSpectrum::overlap(const StateVector& psi) const {
  double w = 0.0;
  for (const auto& g : ground_space) w += std::norm(g.inner(psi));
  return std::clamp(w, 0.0, 1.0);
}

SpiralResult run_spiral(const SpiralConfig& cfg, const ReferenceSpectrum& reference) {
  cfg.validate();
  const PauliSum probe = cfg.resolved_probe();
  const double T = cfg.schedule.total_time;
  SpiralResult out;
  if (cfg.basis == StartBasis::Neel) {
    out.evolution = evolve_timedep([&](double t) { return spiral_hamiltonian(cfg.lattice, cfg.schedule, t); }, 0.0, T,
                                   neel_state(cfg.lattice), probe, cfg.evolution);
    out.overlap = reference.overlap(out.evolution.final_state);
  } else {
    const PauliString flip = neel_flip(cfg.lattice);
    out.evolution = evolve_timedep([&](double t) { return tilde_hamiltonian(cfg.lattice, cfg.schedule, t); }, 0.0, T,
                                   all_down_state(cfg.lattice.nsites()), probe.conjugated_by(flip), cfg.evolution);
    out.evolution.final_state = apply_pauli_string(flip, out.evolution.final_state);
    out.overlap = reference.overlap(out.evolution.final_state);
  }
  out.final_energy = out.evolution.energies.back();
  return out;
}

SpiralResult run_spiral(const SpiralConfig& cfg) {
  cfg.validate();
  return run_spiral(cfg, ReferenceSpectrum::compute(cfg.resolved_probe()));
}

namespace {

template <class Apply>
SweepResult sweep(const SpiralConfig& cfg, const std::vector<double>& values, int workers, std::string axis,
                  Apply apply) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) throw std::invalid_argument(axis + " values must be positive");
    if (k > 0 && !(values[k] > values[k - 1])) throw std::invalid_argument(axis + " values must be strictly increasing");
  }
  cfg.validate();
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(cfg.resolved_probe());
  SweepResult out;
  out.axis = std::move(axis);
  out.e0 = ref.e0;
  out.e1 = ref.e1;
  out.points = parallel_map(values.size(), workers, [&](std::size_t k) {
    SpiralConfig point = cfg;
    apply(point.schedule, values[k]);
    const SpiralResult r = run_spiral(point, ref);
    return SweepPoint{values[k], r.final_energy, r.overlap};
  });
  return out;
}

}  // namespace

SweepResult sweep_omega(const SpiralConfig& cfg, const std::vector<double>& omegas, int workers) {
  return sweep(cfg, omegas, workers, "omega", [](Schedule& s, double v) { s.omega = v; });
}

SweepResult sweep_time(const SpiralConfig& cfg, const std::vector<double>& times, int workers) {
  return sweep(cfg, times, workers, "T", [](Schedule& s, double v) { s.total_time = v; });
}

double floquet_deviation(const CouplingMatrix& couplings, double theta, double omega,
                         const std::vector<double>& penalty) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const int n = couplings.nsites();
  if (n < 1 || n > kMaxEigenSites) throw std::invalid_argument("floquet_deviation needs 1..12 sites");
  if (!penalty.empty() && static_cast<int>(penalty.size()) != n) {
    throw std::invalid_argument("penalty needs one field per site");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  PauliSum ising(n);
  PauliSum effective(n);
  PauliSum rotation(n);
  for (const auto& b : couplings.bonds()) {
    const PauliString zz{{b.i, Axis::Z}, {b.j, Axis::Z}};
    ising.add(b.strength, zz);
    effective.add(b.strength * c * c, zz);
    effective.add(0.5 * b.strength * s * s, PauliString{{b.i, Axis::X}, {b.j, Axis::X}});
    effective.add(0.5 * b.strength * s * s, PauliString{{b.i, Axis::Y}, {b.j, Axis::Y}});
  }
  for (int i = 0; i < n; ++i) {
    const double h = penalty.empty() ? 0.0 : penalty[i];
    ising.add(0.5 * omega * c + 0.5 * h, PauliString::z(i));
    ising.add(0.5 * omega * s, PauliString::x(i));
    effective.add(0.5 * c * h, PauliString::z(i));
    rotation.add(-0.5 * theta, PauliString::y(i));  // exp(-i rotation) = prod exp(i theta Y / 2)
  }
  const double period = 2.0 * std::numbers::pi / omega;
  const Eigen::MatrixXcd exact = dense_propagator(ising, period);
  const Eigen::MatrixXcd ub = dense_propagator(rotation, 1.0);
  const double drive_phase = (n % 2 == 0) ? 1.0 : -1.0;
  const Eigen::MatrixXcd approx = drive_phase * ub.adjoint() * dense_propagator(effective, period) * ub;
  return operator_norm(exact - approx);
}

}  // namespace adspiral
