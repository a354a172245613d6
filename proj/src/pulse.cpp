#include "adspiral/pulse.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "adspiral/parallel.hpp"
#include "adspiral/spiral.hpp"

namespace adspiral {

namespace {

constexpr double kPi = std::numbers::pi;

PauliSum ising_part(const CouplingMatrix& couplings, double t) {
  PauliSum h(couplings.nsites());
  if (t == 0.0) return h;
  for (const auto& b : couplings.bonds()) h.add(t * b.strength, PauliString{{b.i, Axis::Z}, {b.j, Axis::Z}});
  return h;
}

PauliSum uniform_field(int n, Axis axis, double coefficient) {
  PauliSum h(n);
  for (int i = 0; i < n; ++i) h.add(coefficient, PauliString::single(i, axis));
  return h;
}

bool is_half_pi(GateKind k) { return k != GateKind::RZ; }

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RXPlus: return "RX+";
    case GateKind::RXMinus: return "RX-";
    case GateKind::RYPlus: return "RY+";
    case GateKind::RYMinus: return "RY-";
    case GateKind::RZ: return "RZ";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& name) {
  for (GateKind k : {GateKind::RXPlus, GateKind::RXMinus, GateKind::RYPlus, GateKind::RYMinus, GateKind::RZ}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate '" + name + "'");
}

double PulseDevice::epsilon() const { return kPi / (2.0 * omega); }

void PulseDevice::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("drive cap omega must be positive");
  if (static_cast<int>(stagger.size()) != couplings.nsites()) {
    throw std::invalid_argument("device needs one staggering sign per site");
  }
  for (int s : stagger) {
    if (s != 1 && s != -1) throw std::invalid_argument("staggering signs must be +1 or -1");
  }
}

AnalogGate AnalogGate::pulse(GateKind kind, const PulseDevice& device) {
  if (!is_half_pi(kind)) throw std::invalid_argument("AnalogGate::pulse builds pi/2 pulses only");
  return AnalogGate{kind, device.epsilon(), 0.0};
}

AnalogGate AnalogGate::rz(double duration, double kappa) { return AnalogGate{GateKind::RZ, duration, kappa}; }

void check_gate(const AnalogGate& gate, const PulseDevice& device) {
  if (is_half_pi(gate.kind)) {
    if (gate.duration != device.epsilon()) {
      throw std::invalid_argument(to_string(gate.kind) + " lasts " + std::to_string(gate.duration) +
                                  ", the device pulse length is " + std::to_string(device.epsilon()));
    }
    if (gate.kappa != 0.0) throw std::invalid_argument("pi/2 pulses carry no staggered field");
  } else {
    if (!(gate.duration >= 0.0) || !std::isfinite(gate.duration)) {
      throw std::invalid_argument("RZ duration must be finite and non-negative");
    }
    if (!std::isfinite(gate.kappa)) throw std::invalid_argument("RZ kappa must be finite");
  }
}

PauliSum gate_generator(const AnalogGate& gate, const PulseDevice& device, bool ideal) {
  check_gate(gate, device);
  const int n = device.nsites();
  switch (gate.kind) {
    case GateKind::RXPlus:
    case GateKind::RXMinus:
    case GateKind::RYPlus:
    case GateKind::RYMinus: {
      const Axis axis = (gate.kind == GateKind::RXPlus || gate.kind == GateKind::RXMinus) ? Axis::X : Axis::Y;
      const double sign = (gate.kind == GateKind::RXPlus || gate.kind == GateKind::RYPlus) ? 1.0 : -1.0;
      PauliSum h = uniform_field(n, axis, sign * kPi / 4.0);
      if (!ideal) h += ising_part(device.couplings, gate.duration);
      return h;
    }
    case GateKind::RZ: {
      PauliSum h = ising_part(device.couplings, gate.duration);
      for (int i = 0; i < n; ++i) h.add(0.5 * gate.kappa * device.stagger[i], PauliString::z(i));
      return h;
    }
  }
  throw std::logic_error("unhandled gate kind");
}

StateVector apply_analog_gate(const AnalogGate& gate, const PulseDevice& device, const StateVector& psi, bool ideal) {
  if (psi.nsites() != device.nsites()) throw std::invalid_argument("state and device sizes differ");
  return evolve_const(CompiledOperator(gate_generator(gate, device, ideal)), 1.0, psi);
}

double PulseSequence::device_time() const {
  double t = 0.0;
  for (const auto& g : gates) t += g.duration;
  return t;
}

std::string PulseSequence::to_text() const {
  std::string out = "# kind duration kappa\n";
  char line[128];
  for (const auto& g : gates) {
    std::snprintf(line, sizeof line, "%s %.17g %.17g\n", to_string(g.kind).c_str(), g.duration, g.kappa);
    out += line;
  }
  return out;
}

PulseSequence PulseSequence::from_text(const std::string& text) {
  PulseSequence seq;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    AnalogGate g;
    std::string rest;
    if (!(fields >> g.duration >> g.kappa) || (fields >> rest)) {
      throw std::invalid_argument("schedule line " + std::to_string(number) + ": expected 'kind duration kappa'");
    }
    g.kind = gate_kind_from_string(kind);
    seq.gates.push_back(g);
  }
  return seq;
}

StateVector apply_sequence(const PulseSequence& seq, const PulseDevice& device, const StateVector& psi, bool ideal) {
  StateVector state = psi;
  for (const auto& g : seq.gates) state = apply_analog_gate(g, device, state, ideal);
  return state;
}

Eigen::MatrixXcd sequence_unitary(const PulseSequence& seq, const PulseDevice& device, bool ideal) {
  const Eigen::Index dim = Eigen::Index{1} << device.nsites();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : seq.gates) u = dense_propagator(gate_generator(g, device, ideal), 1.0) * u;
  return u;
}

PauliSum magnus_leading(double eta, const CouplingMatrix& couplings) {
  const double diag = eta / 2.0;
  const double mixed = -std::pow(std::sin(kPi * eta / 2.0), 2) / kPi;
  const double osc = std::sin(kPi * eta) / (2.0 * kPi);
  PauliSum out(couplings.nsites());
  for (const auto& b : couplings.bonds()) {
    const double j = b.strength;
    out.add(j * (diag + osc), PauliString{{b.i, Axis::Z}, {b.j, Axis::Z}});
    out.add(j * (diag - osc), PauliString{{b.i, Axis::X}, {b.j, Axis::X}});
    out.add(j * mixed, PauliString{{b.i, Axis::X}, {b.j, Axis::Z}});
    out.add(j * mixed, PauliString{{b.i, Axis::Z}, {b.j, Axis::X}});
  }
  return out;
}

GateWord parse_word(const std::string& text) {
  GateWord word;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (token.rfind("RZ(", 0) == 0 && token.back() == ')') {
      const std::string arg = token.substr(3, token.size() - 4);
      std::size_t used = 0;
      double k = 0.0;
      try {
        k = std::stod(arg, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != arg.size() || !(k >= 0.0)) throw std::invalid_argument("bad RZ duration in word: " + token);
      word.push_back(WordItem{GateKind::RZ, k});
    } else {
      const GateKind kind = gate_kind_from_string(token);
      if (kind == GateKind::RZ) throw std::invalid_argument("RZ in a word needs a duration, e.g. RZ(1)");
      word.push_back(WordItem{kind, 0.0});
    }
  }
  if (word.empty()) throw std::invalid_argument("empty gate word");
  return word;
}

std::string to_string(const GateWord& word) {
  std::ostringstream os;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (k) os << ' ';
    if (word[k].kind == GateKind::RZ) {
      os << "RZ(" << word[k].rz_eps << ')';
    } else {
      os << to_string(word[k].kind);
    }
  }
  return os.str();
}

PulseSequence instantiate(const GateWord& word, const PulseDevice& device) {
  PulseSequence seq;
  for (const auto& item : word) {
    seq.gates.push_back(item.kind == GateKind::RZ ? AnalogGate::rz(item.rz_eps * device.epsilon(), 0.0)
                                                  : AnalogGate::pulse(item.kind, device));
  }
  return seq;
}

namespace words {
GateWord half_pi_y() { return {{GateKind::RYPlus}}; }
GateWord pi_y() { return {{GateKind::RYPlus}, {GateKind::RYPlus}}; }
GateWord xxz() { return {{GateKind::RYPlus}, {GateKind::RYPlus}, {GateKind::RXPlus}, {GateKind::RXPlus}}; }
GateWord xxx() {
  return {{GateKind::RYPlus}, {GateKind::RZ, 1.0}, {GateKind::RYPlus},
          {GateKind::RXPlus}, {GateKind::RZ, 1.0}, {GateKind::RXPlus}};
}
GateWord second_order_core() {
  return {{GateKind::RYPlus}, {GateKind::RXPlus}, {GateKind::RZ, 1.0}, {GateKind::RXPlus}, {GateKind::RYMinus}};
}
}  // namespace words

namespace {

PulseDevice word_device(const CouplingMatrix& couplings, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("pulse length must be positive");
  return PulseDevice{couplings, std::vector<int>(couplings.nsites(), 1), kPi / (2.0 * eps)};
}

// Principal logarithm of a unitary through its Schur form, which is diagonal
// for normal matrices.
Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& u) {
  constexpr double kBranchMargin = 0.1;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const Eigen::MatrixXcd& t = schur.matrixT();
  Eigen::VectorXcd logs(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double phase = std::arg(t(k, k));
    if (std::abs(phase) > kPi - kBranchMargin) {
      throw std::domain_error("eigenphase " + std::to_string(phase) +
                              " too close to the branch cut; use a smaller pulse length");
    }
    logs[k] = std::log(t(k, k));
  }
  return schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
}

Eigen::MatrixXcd generator_matrix(const GateWord& word, const CouplingMatrix& couplings, double eps) {
  const PulseDevice device = word_device(couplings, eps);
  const Eigen::MatrixXcd w = sequence_unitary(instantiate(word, device), device);
  const Eigen::MatrixXcd w0 = ideal_word_unitary(word, couplings.nsites());
  Eigen::MatrixXcd g = Complex(0.0, 1.0) * unitary_log(w0.adjoint() * w) / eps;
  return 0.5 * (g + g.adjoint());
}

}  // namespace

Eigen::MatrixXcd ideal_word_unitary(const GateWord& word, int nsites) {
  const PulseDevice free_device{CouplingMatrix(nsites), std::vector<int>(nsites, 1), 1.0};
  return sequence_unitary(instantiate(word, free_device), free_device, true);
}

PauliSum word_generator(const GateWord& word, const CouplingMatrix& couplings, double eps) {
  return pauli_decompose(generator_matrix(word, couplings, eps), couplings.nsites(), 0.0);
}

PauliSum extract_first_order_generator(const GateWord& word, const CouplingMatrix& couplings, double eps,
                                       double drop_tol) {
  const Eigen::MatrixXcd g1 = generator_matrix(word, couplings, eps);
  const Eigen::MatrixXcd g2 = generator_matrix(word, couplings, eps / 2.0);
  const Eigen::MatrixXcd g4 = generator_matrix(word, couplings, eps / 4.0);
  // G(e) = G1 + e G2 + e^2 G3 + ...: two Richardson levels leave O(e^3).
  const Eigen::MatrixXcd r1 = 2.0 * g2 - g1;
  const Eigen::MatrixXcd r2 = 2.0 * g4 - g2;
  const Eigen::MatrixXcd limit = (4.0 * r2 - r1) / 3.0;
  return pauli_decompose(limit, couplings.nsites(), drop_tol);
}

BiasFit verify_pulse_bias(const GateWord& word, const CouplingMatrix& couplings, const std::vector<double>& eps,
                          const PauliSum& v1) {
  if (eps.size() < 2) throw std::invalid_argument("bias fit needs at least two pulse lengths");
  for (std::size_t k = 1; k < eps.size(); ++k) {
    if (!(eps[k] < eps[k - 1])) throw std::invalid_argument("pulse lengths must be decreasing");
  }
  PauliSum expected(couplings.nsites());
  expected += v1;
  const Eigen::MatrixXcd v1_dense = to_dense(expected);
  BiasFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double e : eps) {
    const double r = e * operator_norm(generator_matrix(word, couplings, e) - v1_dense);
    fit.eps.push_back(e);
    fit.residuals.push_back(r);
    const double x = std::log(e);
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(eps.size());
  fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

std::string to_string(TrotterOrder order) { return order == TrotterOrder::First ? "first" : "second"; }

TrotterOrder trotter_order_from_string(const std::string& name) {
  if (name == "first") return TrotterOrder::First;
  if (name == "second") return TrotterOrder::SecondMinimal;
  throw std::invalid_argument("unknown Trotter order '" + name + "' (expected first or second)");
}

void TrotterPlan::validate() const {
  if (steps < 1) throw std::invalid_argument("Trotter plan needs M >= 1");
  if (!(total_time > 0.0) || !std::isfinite(total_time)) throw std::invalid_argument("Trotter plan needs T > 0");
  if (!std::isfinite(hp)) throw std::invalid_argument("Trotter penalty must be finite");
}

TrotterPlan canonical_second_order_plan(int steps, double omega, double hp) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return TrotterPlan{steps, 2.0 * kPi * steps / omega, hp, TrotterOrder::SecondMinimal};
}

namespace {
// t_M - t_{M-1} for t_m = T sqrt(m/M), written without cancellation.
double last_delta(double total_time, int steps) {
  const double m = static_cast<double>(steps);
  return total_time / (m * (1.0 + std::sqrt(1.0 - 1.0 / m)));
}
}  // namespace

int max_feasible_second_order_steps(double total_time, double omega) {
  const double eps = kPi / (2.0 * omega);
  if (total_time < eps) return 0;
  const int bound = static_cast<int>(std::min(1e8, total_time / (2.0 * eps))) + 2;
  int best = 1;
  for (int m = 1; m <= bound; ++m) {
    if (last_delta(total_time, m) >= eps) best = m;
  }
  return best;
}

SecondOrderSchedule second_order_schedule(const TrotterPlan& plan, double omega) {
  plan.validate();
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const double eps = kPi / (2.0 * omega);
  const int M = plan.steps;
  const double T = plan.total_time;
  SecondOrderSchedule s;
  s.times.resize(M + 1);
  for (int m = 0; m <= M; ++m) s.times[m] = T * std::sqrt(static_cast<double>(m) / M);
  for (int m = 1; m <= M; ++m) {
    const double delta = s.times[m] - s.times[m - 1];
    if (delta < eps) {
      throw std::invalid_argument("second-order plan infeasible: step " + std::to_string(m) + " lasts " +
                                  std::to_string(delta) + " < pulse length " + std::to_string(eps) +
                                  "; largest feasible M for T = " + std::to_string(T) + " is " +
                                  std::to_string(max_feasible_second_order_steps(T, omega)));
    }
    const double tau = 0.5 * (s.times[m] + s.times[m - 1]);
    const double kappa = delta * plan.hp * (1.0 - tau / T);
    s.deltas.push_back(delta);
    s.midpoints.push_back(tau);
    s.kappas.push_back(kappa);
    s.device_times.push_back(delta + 4.0 * eps);
    s.total_device_time += delta + 4.0 * eps;
    s.kappa_identity_residual = std::max(s.kappa_identity_residual, std::abs(kappa - plan.hp * (delta - 2.0 * eps)));
  }
  return s;
}

TrotterSequence build_trotter_sequence(const TrotterPlan& plan, const PulseDevice& device) {
  plan.validate();
  device.validate();
  const double eps = device.epsilon();
  auto pulse = [&](GateKind k) { return AnalogGate::pulse(k, device); };
  TrotterSequence out;
  auto& g = out.sequence.gates;
  const int M = plan.steps;
  if (plan.order == TrotterOrder::First) {
    const double dt = plan.total_time / M;
    for (int m = 1; m <= M; ++m) {
      const double frac = static_cast<double>(m) / M;
      g.push_back(pulse(GateKind::RYPlus));
      g.push_back(AnalogGate::rz(frac * dt, 0.0));
      g.push_back(pulse(GateKind::RYMinus));
      g.push_back(pulse(GateKind::RXPlus));
      g.push_back(AnalogGate::rz(frac * dt, 0.0));
      g.push_back(pulse(GateKind::RXMinus));
      g.push_back(AnalogGate::rz(dt, plan.hp * (1.0 - frac) * dt));
      out.step_ends.push_back(g.size());
      out.step_times.push_back(plan.total_time * frac);
    }
  } else {
    const SecondOrderSchedule s = second_order_schedule(plan, device.omega);
    for (int m = 0; m < M; ++m) {
      const AnalogGate outer = AnalogGate::rz(0.5 * (s.deltas[m] - eps), 0.5 * s.kappas[m]);
      g.push_back(outer);
      g.push_back(pulse(GateKind::RYPlus));
      g.push_back(pulse(GateKind::RXPlus));
      g.push_back(AnalogGate::rz(eps, 0.0));
      g.push_back(pulse(GateKind::RXPlus));
      g.push_back(pulse(GateKind::RYMinus));
      g.push_back(outer);
      out.step_ends.push_back(g.size());
      out.step_times.push_back(s.times[m + 1]);
    }
  }
  return out;
}

TrotterResult run_trotter(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                          const PauliSum& probe, bool ideal) {
  if (psi0.nsites() != device.nsites()) throw std::invalid_argument("initial state and device sizes differ");
  if (ideal && plan.order == TrotterOrder::SecondMinimal) {
    // The second-order word relies on the O(eps) pulse terms; without them it is not a Trotter step.
    throw std::invalid_argument("ideal pulses apply to first-order plans only");
  }
  TrotterResult out;
  out.plan = build_trotter_sequence(plan, device);
  out.device_time = out.plan.sequence.device_time();
  PauliSum widened(device.nsites());
  widened += probe;
  const CompiledOperator probe_op(widened);
  StateVector state = psi0;
  out.evolution.times.push_back(0.0);
  out.evolution.energies.push_back(expectation(probe_op, state));
  std::size_t next = 0;
  for (std::size_t m = 0; m < out.plan.step_ends.size(); ++m) {
    for (; next < out.plan.step_ends[m]; ++next) {
      state = apply_analog_gate(out.plan.sequence.gates[next], device, state, ideal);
    }
    out.evolution.times.push_back(out.plan.step_times[m]);
    out.evolution.energies.push_back(expectation(probe_op, state));
  }
  out.evolution.final_state = std::move(state);
  out.evolution.steps = plan.steps;
  out.final_energy = out.evolution.energies.back();
  return out;
}

TrotterResult trotter_first_order(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                                  const PauliSum& probe, bool ideal) {
  TrotterPlan p = plan;
  p.order = TrotterOrder::First;
  return run_trotter(p, device, psi0, probe, ideal);
}

TrotterResult trotter_second_order(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                                   const PauliSum& probe, bool ideal) {
  TrotterPlan p = plan;
  p.order = TrotterOrder::SecondMinimal;
  return run_trotter(p, device, psi0, probe, ideal);
}

PulseDevice device_for(const LatticeSpec& spec, double omega) {
  spec.validate();
  PulseDevice d{spec.couplings().scaled(spec.spiral_ising_prefactor()), spec.stagger(), omega};
  d.validate();
  return d;
}

CompareTable compare_protocols(const LatticeSpec& spec, double omega, const std::vector<double>& times,
                               const std::vector<int>& steps, const CompareOptions& options) {
  if (steps.empty()) throw std::invalid_argument("compare needs at least one Trotter step count");
  const PulseDevice device = device_for(spec, omega);
  SpiralConfig spiral{spec, options.spiral, StartBasis::Neel, std::nullopt, options.evolution};
  spiral.schedule.omega = omega;
  const SweepResult curve = sweep_time(spiral, times, options.workers);

  const PauliSum probe = heisenberg(spec);
  const StateVector neel = neel_state(spec);
  const std::size_t nm = steps.size();
  struct Cell {
    double energy;
    double device_time;
  };
  const auto cells = parallel_map(times.size() * nm, options.workers, [&](std::size_t k) {
    const TrotterPlan plan{steps[k % nm], times[k / nm], options.trotter_hp, options.order};
    if (plan.order == TrotterOrder::SecondMinimal &&
        plan.steps > max_feasible_second_order_steps(plan.total_time, omega)) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      return Cell{nan, nan};
    }
    const TrotterResult r = run_trotter(plan, device, neel, probe);
    return Cell{r.final_energy, r.device_time};
  });

  CompareTable table;
  table.steps = steps;
  table.e0 = curve.e0;
  table.e1 = curve.e1;
  table.coherence_limit = options.coherence_time * options.drive_cap / omega;
  for (std::size_t i = 0; i < times.size(); ++i) {
    CompareRow row{times[i], curve.points[i].energy, {}, {}};
    for (std::size_t j = 0; j < nm; ++j) {
      row.trotter_energies.push_back(cells[i * nm + j].energy);
      row.trotter_device_times.push_back(cells[i * nm + j].device_time);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace adspiral
