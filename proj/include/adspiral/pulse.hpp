#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adspiral/engine.hpp"
#include "adspiral/lattice.hpp"

namespace adspiral {

enum class GateKind { RXPlus, RXMinus, RYPlus, RYMinus, RZ };

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

/// Ising hardware with a bounded global drive. The Ising term is always on.
struct PulseDevice {
  CouplingMatrix couplings;
  std::vector<int> stagger;
  double omega = 8.0;

  /// Duration of a pi/2 pulse, pi / (2 omega).
  double epsilon() const;
  int nsites() const { return couplings.nsites(); }
  void validate() const;
};

struct AnalogGate {
  GateKind kind = GateKind::RZ;
  double duration = 0.0;
  /// Staggered-field angle; RZ only.
  double kappa = 0.0;

  static AnalogGate pulse(GateKind kind, const PulseDevice& device);
  static AnalogGate rz(double duration, double kappa);
};

/// Hamiltonian G with gate = exp(-i G):
///   RX+- : eps sum J Z Z +- (pi/4) sum X      RY+- : same with Y
///   RZ(t, kappa) : t sum J Z Z + (kappa/2) sum s_j Z_j
/// With `ideal`, pi/2 pulses drop the Ising term (infinitely fast pulses).
PauliSum gate_generator(const AnalogGate& gate, const PulseDevice& device, bool ideal = false);

/// Throws std::invalid_argument when a pi/2 pulse does not last exactly
/// device.epsilon() or an RZ gate has negative duration or non-finite kappa.
void check_gate(const AnalogGate& gate, const PulseDevice& device);

StateVector apply_analog_gate(const AnalogGate& gate, const PulseDevice& device, const StateVector& psi,
                              bool ideal = false);

/// Gates in the order they are applied in time.
struct PulseSequence {
  std::vector<AnalogGate> gates;

  double device_time() const;
  /// One gate per line: kind, duration, kappa. '#' starts a comment.
  std::string to_text() const;
  static PulseSequence from_text(const std::string& text);
};

StateVector apply_sequence(const PulseSequence& seq, const PulseDevice& device, const StateVector& psi,
                           bool ideal = false);
/// Dense unitary of the sequence, for small registers.
Eigen::MatrixXcd sequence_unitary(const PulseSequence& seq, const PulseDevice& device, bool ideal = false);

/// Closed-form leading Magnus coefficient of a Y-pulse of fractional length eta:
///   sum J_ij [eta (ZZ + XX)/2 - sin^2(pi eta/2)(XZ + ZX)/pi + sin(pi eta)/pi (ZZ - XX)/2]
/// where XZ + ZX stands for X_i Z_j + Z_i X_j.
PauliSum magnus_leading(double eta, const CouplingMatrix& couplings);

/// A gate word whose RZ durations scale with the pulse length.
struct WordItem {
  GateKind kind;
  /// RZ duration in units of eps; ignored for pi/2 pulses.
  double rz_eps = 0.0;
};
using GateWord = std::vector<WordItem>;  // time order

/// Parses "RY+ RZ(1) RY+": pi/2 pulses by name, RZ(k) an RZ of duration k eps.
GateWord parse_word(const std::string& text);
std::string to_string(const GateWord& word);
PulseSequence instantiate(const GateWord& word, const PulseDevice& device);

namespace words {
GateWord half_pi_y();        ///< RY+
GateWord pi_y();             ///< (RY+)^2
GateWord xxz();              ///< (RX+)^2 (RY+)^2
GateWord xxx();              ///< (RX+ RZ(eps,0) RX+)(RY+ RZ(eps,0) RY+)
GateWord second_order_core();///< RY+ RX+ RZ(eps,0) RX+ RY-
}  // namespace words

/// Generator G(eps) defined by W0^dag W(eps) = exp(-i eps G(eps)), with W0 the
/// word under ideal pulses. Uses the principal logarithm from a Schur
/// decomposition; throws std::domain_error when an eigenphase is too close to
/// +-pi for the branch to be trusted.
PauliSum word_generator(const GateWord& word, const CouplingMatrix& couplings, double eps);

/// The eps -> 0 limit of word_generator, extrapolated from eps, eps/2, eps/4
/// (error O(eps^3)), with coefficients below drop_tol removed.
PauliSum extract_first_order_generator(const GateWord& word, const CouplingMatrix& couplings, double eps,
                                       double drop_tol = 1e-12);

/// Dense W0 of a word (ideal pulses only).
Eigen::MatrixXcd ideal_word_unitary(const GateWord& word, int nsites);

struct BiasFit {
  std::vector<double> eps;
  /// || eps G(eps) - eps v1 || in operator norm.
  std::vector<double> residuals;
  /// Least-squares slope of log residual against log eps.
  double order = 0.0;
};

/// Scaling of the exponent residual beyond the expected leading term v1.
BiasFit verify_pulse_bias(const GateWord& word, const CouplingMatrix& couplings, const std::vector<double>& eps,
                          const PauliSum& v1);

enum class TrotterOrder { First, SecondMinimal };

std::string to_string(TrotterOrder order);
TrotterOrder trotter_order_from_string(const std::string& name);

struct TrotterPlan {
  int steps = 4;  ///< M
  double total_time = 1.0;  ///< T
  double hp = 0.0;
  TrotterOrder order = TrotterOrder::First;

  void validate() const;
};

/// The plan whose step times t_m = (2 pi / omega) sqrt(m M) end at T = t_M.
TrotterPlan canonical_second_order_plan(int steps, double omega, double hp);

/// Step times t_m = T sqrt(m / M), m = 0..M, and what the second-order word needs.
struct SecondOrderSchedule {
  std::vector<double> times;          ///< t_0 .. t_M
  std::vector<double> deltas;         ///< delta_m = t_m - t_{m-1}
  std::vector<double> midpoints;      ///< tau_m
  std::vector<double> kappas;         ///< delta_m hP (1 - tau_m / T)
  std::vector<double> device_times;   ///< theta_m = delta_m + 4 eps
  double total_device_time = 0.0;     ///< Theta
  /// max_m |kappa_m - hP (delta_m - 2 eps)|; zero on canonical plans.
  double kappa_identity_residual = 0.0;
};

/// Largest M with min_m delta_m >= eps for the given T and omega; 0 if none.
int max_feasible_second_order_steps(double total_time, double omega);

/// Throws std::invalid_argument naming the largest feasible M when some
/// delta_m < eps.
SecondOrderSchedule second_order_schedule(const TrotterPlan& plan, double omega);

/// Gate sequence of a plan; step_ends[m] is the gate count after step m + 1.
struct TrotterSequence {
  PulseSequence sequence;
  std::vector<std::size_t> step_ends;
  std::vector<double> step_times;  ///< simulated time reached after each step
};

/// First order, step m (time order):
///   RY+, RZ(m dt/M, 0), RY-, RX+, RZ(m dt/M, 0), RX-, RZ(dt, hP (1 - m/M) dt)
/// Second order, step m (time order):
///   RZ((delta-eps)/2, kappa/2), RY+, RX+, RZ(eps, 0), RX+, RY-, RZ((delta-eps)/2, kappa/2)
TrotterSequence build_trotter_sequence(const TrotterPlan& plan, const PulseDevice& device);

struct TrotterResult {
  TrotterSequence plan;
  /// Probe energy at t = 0 and after every step.
  EvolutionResult evolution;
  double final_energy = 0.0;
  double device_time = 0.0;
};

TrotterResult run_trotter(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                          const PauliSum& probe, bool ideal = false);
TrotterResult trotter_first_order(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                                  const PauliSum& probe, bool ideal = false);
TrotterResult trotter_second_order(const TrotterPlan& plan, const PulseDevice& device, const StateVector& psi0,
                                   const PauliSum& probe, bool ideal = false);

/// Device for a lattice realised on the spiral's atom array: couplings scaled
/// by spec.spiral_ising_prefactor(), lattice staggering signs.
PulseDevice device_for(const LatticeSpec& spec, double omega);

struct CompareRow {
  double total_time;
  double spiral_energy;
  std::vector<double> trotter_energies;      ///< one per M; NaN if the plan is infeasible
  std::vector<double> trotter_device_times;  ///< one per M; NaN if the plan is infeasible
};

struct CompareTable {
  std::vector<int> steps;
  std::vector<CompareRow> rows;
  double e0 = 0.0;
  double e1 = 0.0;
  /// Coherence limit in units of 1/J.
  double coherence_limit = 0.0;
};

struct CompareOptions {
  /// Spiral schedule; its total_time and omega are overridden.
  Schedule spiral;
  double trotter_hp = 0.18;
  TrotterOrder order = TrotterOrder::First;
  EvolutionOptions evolution;
  /// Hardware coherence time and drive cap, used to express the coherence
  /// limit in units of 1/J: drive_cap / omega is the size of 1/J.
  double coherence_time = 3.0;                          // microseconds
  double drive_cap = 2.0 * 3.14159265358979323846 * 4.3;  // rad / microsecond
  int workers = 1;
};

/// Spiral versus fixed-M Trotterised adiabatics over a grid of switching times T.
CompareTable compare_protocols(const LatticeSpec& spec, double omega, const std::vector<double>& times,
                               const std::vector<int>& steps, const CompareOptions& options);

}  // namespace adspiral
