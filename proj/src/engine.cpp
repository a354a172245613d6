#include "adspiral/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "adspiral/errors.hpp"

namespace adspiral {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex i_power(int k) {
  static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowers[((k % 4) + 4) % 4];
}

double parity_sign(std::uint64_t b, std::uint64_t z) { return (std::popcount(b & z) & 1) ? -1.0 : 1.0; }

void check_register(int nsites) {
  if (nsites < 1 || nsites > kMaxStateSites) {
    throw std::invalid_argument("register of " + std::to_string(nsites) + " sites outside the supported range [1, " +
                                std::to_string(kMaxStateSites) + "]");
  }
}

void check_match(int operator_sites, const StateVector& psi) {
  if (operator_sites > psi.nsites()) {
    throw std::invalid_argument("operator acts on " + std::to_string(operator_sites) + " sites, state has " +
                                std::to_string(psi.nsites()));
  }
}

}  // namespace

StateVector::StateVector(int nsites, Amplitudes amplitudes) : nsites_(nsites), amplitudes_(std::move(amplitudes)) {
  check_register(nsites);
  if (amplitudes_.size() != (Eigen::Index{1} << nsites)) {
    throw std::invalid_argument("amplitude vector length does not equal 2^nsites");
  }
}

StateVector StateVector::basis(int nsites, std::uint64_t index) {
  check_register(nsites);
  Amplitudes a = Amplitudes::Zero(Eigen::Index{1} << nsites);
  if (index >= static_cast<std::uint64_t>(a.size())) throw std::out_of_range("basis index out of range");
  a[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(nsites, std::move(a));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalise the zero vector");
  return StateVector(nsites_, amplitudes_ / n);
}

StateVector neel_state(int nsites) {
  std::uint64_t index = 0;
  for (int j = 1; j < nsites; j += 2) index |= std::uint64_t{1} << j;
  return StateVector::basis(nsites, index);
}

StateVector neel_state(const LatticeSpec& spec) {
  const auto s = spec.stagger();
  std::uint64_t index = 0;
  for (int i = 0; i < spec.nsites(); ++i) {
    if (s[i] > 0) index |= std::uint64_t{1} << i;  // Z_i = -s_i = -1: spin down
  }
  return StateVector::basis(spec.nsites(), index);
}

StateVector all_down_state(int nsites) {
  check_register(nsites);
  return StateVector::basis(nsites, (std::uint64_t{1} << nsites) - 1);
}

CompiledOperator::CompiledOperator(const PauliSum& h) : nsites_(h.nsites()) {
  check_register(std::max(1, nsites_));
  const std::uint64_t dim = std::uint64_t{1} << nsites_;
  diag_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  double off_diagonal = 0.0;
  for (const auto& term : h.terms()) {
    const auto x = term.string.x_mask();
    const auto z = term.string.z_mask();
    if (x == 0 && z == 0) {
      shift_ += term.coefficient;
      continue;
    }
    norm_bound_ += std::abs(term.coefficient);
    if (x == 0) {
      for (std::uint64_t b = 0; b < dim; ++b) diag_[static_cast<Eigen::Index>(b)] += term.coefficient * parity_sign(b, z);
      continue;
    }
    auto it = std::find_if(groups_.begin(), groups_.end(), [x](const FlipGroup& g) { return g.flip == x; });
    if (it == groups_.end()) {
      groups_.push_back(FlipGroup{x, Amplitudes::Zero(static_cast<Eigen::Index>(dim))});
      it = groups_.end() - 1;
    }
    const Complex c = term.coefficient * i_power(std::popcount(x & z));
    for (std::uint64_t b = 0; b < dim; ++b) it->factor[static_cast<Eigen::Index>(b)] += c * parity_sign(b, z);
    off_diagonal += std::abs(term.coefficient);
  }
  const double lo = diag_.minCoeff();
  const double hi = diag_.maxCoeff();
  center_ = 0.5 * (lo + hi);
  radius_ = 0.5 * (hi - lo) + off_diagonal;
}

void CompiledOperator::apply(const Amplitudes& in, Amplitudes& out) const {
  const Eigen::Index dim = diag_.size();
  out.resize(dim);
  for (Eigen::Index b = 0; b < dim; ++b) out[b] = (diag_[b] + shift_) * in[b];
  for (const auto& g : groups_) {
    const auto flip = static_cast<Eigen::Index>(g.flip);
    const Complex* f = g.factor.data();
    const Complex* v = in.data();
    Complex* o = out.data();
    for (Eigen::Index b = 0; b < dim; ++b) o[b ^ flip] += f[b] * v[b];
  }
}

Amplitudes apply_pauli_sum(const PauliSum& h, const StateVector& psi) {
  check_match(h.nsites(), psi);
  PauliSum widened(psi.nsites());
  widened += h;
  CompiledOperator op(widened);
  Amplitudes out;
  op.apply(psi.amplitudes(), out);
  return out;
}

StateVector apply_pauli_string(const PauliString& p, const StateVector& psi) {
  if (p.max_site() >= psi.nsites()) throw std::invalid_argument("Pauli string exceeds the register");
  const auto x = static_cast<Eigen::Index>(p.x_mask());
  const auto z = p.z_mask();
  const Complex phase = p.phase() * i_power(std::popcount(p.x_mask() & z));
  Amplitudes out(psi.amplitudes().size());
  for (Eigen::Index b = 0; b < out.size(); ++b) {
    out[b ^ x] = phase * parity_sign(static_cast<std::uint64_t>(b), z) * psi.amplitudes()[b];
  }
  return StateVector(psi.nsites(), std::move(out));
}

double expectation(const CompiledOperator& h, const StateVector& psi) {
  check_match(h.nsites(), psi);
  Amplitudes hv;
  h.apply(psi.amplitudes(), hv);
  const Complex e = psi.amplitudes().dot(hv);
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real()))) {
    throw std::logic_error("expectation value has imaginary part " + std::to_string(e.imag()) +
                           "; the operator is not Hermitian");
  }
  return e.real();
}

double expectation(const PauliSum& h, const StateVector& psi) {
  check_match(h.nsites(), psi);
  PauliSum widened(psi.nsites());
  widened += h;
  return expectation(CompiledOperator(widened), psi);
}

namespace {

// J_0(x) .. J_n(x) by Miller's backward recurrence, normalised with
// J_0 + 2 sum J_2k = 1.
std::vector<double> bessel_sequence(double x, int n) {
  std::vector<double> j(n + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const int start = n + 20 + static_cast<int>(x);
  double next = 0.0;
  double current = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double previous = 2.0 * k / x * current - next;
    next = current;
    current = previous;
    if (std::abs(current) > 1e250) {
      // Rescale to stay in range.
      next *= 1e-250;
      current *= 1e-250;
      norm *= 1e-250;
      for (auto& v : j) v *= 1e-250;
    }
    if (k - 1 <= n) j[k - 1] = current;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * current;
  }
  norm += current;
  for (auto& v : j) v /= norm;
  return j;
}

// Smallest order beyond which |J_k(x)| < 1e-17 for every k.
int chebyshev_order(double x) {
  int k = static_cast<int>(std::ceil(x));
  double bound = 1.0;  // (x/2)^k / k! evaluated in logs below
  for (;; ++k) {
    bound = k * std::log(0.5 * x) - std::lgamma(k + 1.0);
    if (x == 0.0 || bound < std::log(1e-17)) return std::max(k, 1);
  }
}

}  // namespace

StateVector evolve_const(const CompiledOperator& h, double dt, const StateVector& psi) {
  check_match(h.nsites(), psi);
  if (h.nsites() != psi.nsites()) throw std::invalid_argument("compiled operator size differs from the state");
  if (dt == 0.0) return psi;
  if (h.diagonal()) {
    Amplitudes result = psi.amplitudes();
    const auto& d = h.diagonal_part();
    for (Eigen::Index b = 0; b < result.size(); ++b) result[b] *= std::exp(-kI * (d[b] + h.shift()) * dt);
    return StateVector(psi.nsites(), std::move(result));
  }
  // exp(-i x tau) = J_0(tau) + 2 sum_k (-i)^k J_k(tau) T_k(x) with
  // x = (H - shift - center) / radius and tau = radius * dt.
  constexpr double kMaxTau = 64.0;
  const double radius = h.spectral_radius();
  const double center = h.spectral_center();
  const int substeps = std::max(1, static_cast<int>(std::ceil(radius * std::abs(dt) / kMaxTau)));
  const double step = dt / substeps;
  const double tau = radius * step;  // signed
  const int order = chebyshev_order(std::abs(tau));
  std::vector<double> bessel = bessel_sequence(std::abs(tau), order);
  // J_k(-x) = (-1)^k J_k(x)
  if (tau < 0) {
    for (int k = 1; k <= order; k += 2) bessel[k] = -bessel[k];
  }
  const Complex phase = std::exp(-kI * (h.shift() + center) * step);
  const double scale = 1.0 / radius;
  const Complex kMinusI{0.0, -1.0};

  Amplitudes state = psi.amplitudes();
  Amplitudes prev(state.size());
  Amplitudes curr(state.size());
  Amplitudes next(state.size());
  Amplitudes acc(state.size());
  auto apply_scaled = [&](const Amplitudes& in, Amplitudes& out) {
    h.apply(in, out);
    out -= (h.shift() + center) * in;
    out *= scale;
  };
  for (int s = 0; s < substeps; ++s) {
    prev = state;
    apply_scaled(prev, curr);
    acc = bessel[0] * prev + (2.0 * bessel[1] * kMinusI) * curr;
    Complex ik = kMinusI;
    for (int k = 2; k <= order; ++k) {
      apply_scaled(curr, next);
      next = 2.0 * next - prev;
      ik *= kMinusI;
      acc += (2.0 * bessel[k] * ik) * next;
      std::swap(prev, curr);
      std::swap(curr, next);
    }
    state = phase * acc;
  }
  return StateVector(psi.nsites(), std::move(state));
}

StateVector evolve_const(const PauliSum& h, double dt, const StateVector& psi) {
  check_match(h.nsites(), psi);
  PauliSum widened(psi.nsites());
  widened += h;
  return evolve_const(CompiledOperator(widened), dt, psi);
}

namespace {

PauliSum widen(const PauliSum& h, int nsites) {
  if (h.nsites() == nsites) return h;
  PauliSum w(nsites);
  w += h;
  return w;
}

StateVector step(const HamiltonianFn& h, double t, double dt, const StateVector& psi, Stepper stepper) {
  const int n = psi.nsites();
  if (stepper == Stepper::Midpoint) {
    return evolve_const(CompiledOperator(widen(h(t + 0.5 * dt), n)), dt, psi);
  }
  // Commutator-free fourth-order Magnus integrator: the exponential weighted
  // towards the earlier Gauss point acts first.
  static const double kNode = std::sqrt(3.0) / 6.0;
  static const double kEarly = 0.25 + kNode;
  static const double kLate = 0.25 - kNode;
  const PauliSum h1 = widen(h(t + (0.5 - kNode) * dt), n);
  const PauliSum h2 = widen(h(t + (0.5 + kNode) * dt), n);
  const StateVector mid = evolve_const(CompiledOperator(kEarly * h1 + kLate * h2), dt, psi);
  return evolve_const(CompiledOperator(kLate * h1 + kEarly * h2), dt, mid);
}

struct Pass {
  StateVector final_state;
  std::vector<double> energies;
};

Pass run_pass(const HamiltonianFn& h, double t0, double t1, const StateVector& psi, const CompiledOperator& probe,
              int samples, std::int64_t substeps, Stepper stepper) {
  Pass pass{psi, {}};
  pass.energies.reserve(samples + 1);
  pass.energies.push_back(expectation(probe, psi));
  const double span = t1 - t0;
  const std::int64_t total = samples * substeps;
  for (int s = 0; s < samples; ++s) {
    for (std::int64_t k = 0; k < substeps; ++k) {
      const std::int64_t index = s * substeps + k;
      const double ta = t0 + span * static_cast<double>(index) / static_cast<double>(total);
      const double tb = t0 + span * static_cast<double>(index + 1) / static_cast<double>(total);
      pass.final_state = step(h, ta, tb - ta, pass.final_state, stepper);
    }
    pass.energies.push_back(expectation(probe, pass.final_state));
  }
  return pass;
}

}  // namespace

StateVector evolve_fixed_steps(const HamiltonianFn& h, double t0, double t1, const StateVector& psi,
                               std::int64_t steps, Stepper stepper) {
  if (!(t1 > t0)) throw std::invalid_argument("evolution needs t1 > t0");
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  StateVector state = psi;
  const double span = t1 - t0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double ta = t0 + span * static_cast<double>(k) / static_cast<double>(steps);
    const double tb = t0 + span * static_cast<double>(k + 1) / static_cast<double>(steps);
    state = step(h, ta, tb - ta, state, stepper);
  }
  return state;
}

EvolutionResult evolve_timedep(const HamiltonianFn& h, double t0, double t1, const StateVector& psi,
                               const PauliSum& probe, const EvolutionOptions& options) {
  if (!(t1 > t0)) throw std::invalid_argument("evolution needs t1 > t0");
  if (options.samples < 1 || options.initial_substeps < 1) {
    throw std::invalid_argument("sample and substep counts must be positive");
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const CompiledOperator probe_op(widen(probe, psi.nsites()));

  std::int64_t substeps = options.initial_substeps;
  Pass coarse = run_pass(h, t0, t1, psi, probe_op, options.samples, substeps, options.stepper);
  double error = 0.0;
  for (;;) {
    substeps *= 2;
    if (options.samples * substeps > options.max_steps) {
      char msg[160];
      if (substeps == 2 * options.initial_substeps) {
        std::snprintf(msg, sizeof msg, "time evolution step budget %lld leaves no room to refine %d samples",
                      static_cast<long long>(options.max_steps), options.samples);
      } else {
        std::snprintf(msg, sizeof msg,
                      "time evolution did not reach tolerance %.3g within %lld steps (last refinement error %.3g)",
                      options.tol, static_cast<long long>(options.max_steps), error);
      }
      throw ConvergenceError(msg);
    }
    Pass fine = run_pass(h, t0, t1, psi, probe_op, options.samples, substeps, options.stepper);
    error = fine.final_state.distance(coarse.final_state);
    coarse = std::move(fine);
    if (error <= options.tol) break;
  }

  EvolutionResult result;
  result.final_state = std::move(coarse.final_state);
  result.energies = std::move(coarse.energies);
  result.times.reserve(options.samples + 1);
  for (int s = 0; s <= options.samples; ++s) {
    result.times.push_back(t0 + (t1 - t0) * static_cast<double>(s) / options.samples);
  }
  result.steps = options.samples * substeps;
  result.refinement_error = error;
  return result;
}

Eigen::MatrixXcd to_dense(const PauliSum& h) {
  const int n = h.nsites();
  if (n > kMaxStateSites) throw std::invalid_argument("dense matrix too large");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : h.terms()) {
    const auto x = static_cast<Eigen::Index>(term.string.x_mask());
    const auto z = term.string.z_mask();
    const Complex c = term.coefficient * i_power(std::popcount(term.string.x_mask() & z));
    for (Eigen::Index b = 0; b < dim; ++b) m(b ^ x, b) += c * parity_sign(static_cast<std::uint64_t>(b), z);
  }
  return m;
}

std::vector<Eigenpair> eigensolve_lowest(const PauliSum& h, int k) {
  if (h.nsites() > kMaxEigenSites) {
    throw std::invalid_argument("dense eigensolve limited to " + std::to_string(kMaxEigenSites) + " sites");
  }
  const int n = std::max(1, h.nsites());
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (k < 1 || k > dim) throw std::invalid_argument("requested eigenpair count outside [1, dimension]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(widen(h, n)));
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed");
  std::vector<Eigenpair> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.push_back(Eigenpair{solver.eigenvalues()[i], StateVector(n, solver.eigenvectors().col(i))});
  return out;
}

Eigen::VectorXd spectrum(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Eigen::MatrixXcd dense_propagator(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXcd phases = (-kI * t * solver.eigenvalues().cast<Complex>()).array().exp();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Eigen::MatrixXcd dense_propagator(const PauliSum& h, double t) { return dense_propagator(to_dense(h), t); }

PauliSum pauli_decompose(const Eigen::MatrixXcd& m, int nsites, double drop_tol) {
  if (nsites > 8) throw std::invalid_argument("Pauli decomposition limited to 8 sites");
  const Eigen::Index dim = Eigen::Index{1} << nsites;
  if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("matrix size does not match 2^nsites");
  PauliSum out(nsites);
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
    for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(dim); ++z) {
      // Tr(P M) with P|b> = i^{#Y} (-1)^{b.z} |b ^ x>.
      Complex trace = 0.0;
      for (Eigen::Index b = 0; b < dim; ++b) {
        trace += parity_sign(static_cast<std::uint64_t>(b), z) * m(b, b ^ static_cast<Eigen::Index>(x));
      }
      trace *= i_power(std::popcount(x & z));
      const double c = trace.real() / static_cast<double>(dim);
      if (std::abs(c) > drop_tol) out.add(c, PauliString::from_masks(x, z));
    }
  }
  return out;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace adspiral
