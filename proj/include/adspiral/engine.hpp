#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "adspiral/lattice.hpp"
#include "adspiral/pauli.hpp"

namespace adspiral {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

/// Largest register the state-vector engine accepts.
inline constexpr int kMaxStateSites = 14;
/// Largest register the dense eigensolver accepts.
inline constexpr int kMaxEigenSites = 12;

/// Amplitudes over the 2^n computational basis states. Bit j of the basis
/// index is site j; bit value 0 is spin up (Z = +1) and 1 is spin down.
class StateVector {
 public:
  StateVector() = default;
  StateVector(int nsites, Amplitudes amplitudes);

  static StateVector basis(int nsites, std::uint64_t index);

  int nsites() const { return nsites_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t index) const { return amplitudes_[static_cast<Eigen::Index>(index)]; }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;
  Complex inner(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }
  /// Euclidean distance ||this - other||.
  double distance(const StateVector& other) const { return (amplitudes_ - other.amplitudes_).norm(); }

 private:
  int nsites_ = 0;
  Amplitudes amplitudes_;
};

/// |up down up down ...> on n sites.
StateVector neel_state(int nsites);
/// The Neel pattern of a lattice: Z_i = -s_i for its staggering signs s_i.
StateVector neel_state(const LatticeSpec& spec);
StateVector all_down_state(int nsites);

/// Matrix-free form of a PauliSum, grouped by bit-flip pattern. Build it once
/// when the same operator is applied many times.
class CompiledOperator {
 public:
  explicit CompiledOperator(const PauliSum& h);

  int nsites() const { return nsites_; }
  /// out = H * in; out must not alias in.
  void apply(const Amplitudes& in, Amplitudes& out) const;
  /// Constant diagonal shift (identity coefficient).
  double shift() const { return shift_; }
  double norm_bound() const { return norm_bound_; }
  /// The spectrum of H - shift lies in [center - radius, center + radius]:
  /// exact diagonal range widened by the off-diagonal coefficient sum.
  double spectral_center() const { return center_; }
  double spectral_radius() const { return radius_; }
  bool diagonal() const { return groups_.empty(); }
  const Eigen::VectorXd& diagonal_part() const { return diag_; }

 private:
  struct FlipGroup {
    std::uint64_t flip;
    Amplitudes factor;  // indexed by the source basis state
  };
  int nsites_;
  double shift_ = 0.0;
  double norm_bound_ = 0.0;
  double center_ = 0.0;
  double radius_ = 0.0;
  Eigen::VectorXd diag_;  // identity shift removed
  std::vector<FlipGroup> groups_;
};

/// H|psi>, unnormalised.
Amplitudes apply_pauli_sum(const PauliSum& h, const StateVector& psi);
StateVector apply_pauli_string(const PauliString& p, const StateVector& psi);

/// <psi|H|psi>. Throws std::logic_error when the imaginary part exceeds
/// 1e-10 * max(1, |<H>|), which can only come from a non-Hermitian operator.
double expectation(const PauliSum& h, const StateVector& psi);
double expectation(const CompiledOperator& h, const StateVector& psi);

/// exp(-i H dt)|psi> through a Chebyshev expansion applied to the vector,
/// truncated once the Bessel weights drop below 1e-17. Diagonal operators are
/// exponentiated exactly.
StateVector evolve_const(const PauliSum& h, double dt, const StateVector& psi);
StateVector evolve_const(const CompiledOperator& h, double dt, const StateVector& psi);

enum class Stepper {
  Midpoint,           ///< exp(-i dt H(t + dt/2)), second order
  CommutatorFree4,    ///< two exponentials at the Gauss points, fourth order
};

struct EvolutionOptions {
  /// Accept when two successive step-halvings differ by less than tol in state distance.
  double tol = 1e-8;
  /// Number of uniform sampling intervals; energies are recorded at samples + 1 times.
  int samples = 200;
  /// Steps per sampling interval of the first, coarsest pass.
  int initial_substeps = 1;
  /// Total step budget of the finest pass before giving up.
  std::int64_t max_steps = std::int64_t{1} << 22;
  Stepper stepper = Stepper::CommutatorFree4;
};

struct EvolutionResult {
  StateVector final_state;
  std::vector<double> times;
  std::vector<double> energies;
  std::int64_t steps = 0;
  /// Distance between the last two refinements.
  double refinement_error = 0.0;
};

using HamiltonianFn = std::function<PauliSum(double)>;

/// Time-ordered evolution of psi from t0 to t1 under H(t). Uniform steps are
/// halved until the final states of successive passes agree within
/// options.tol; the finer pass is returned. Probe energies are sampled on the
/// finest pass. Throws ConvergenceError when the step budget runs out.
EvolutionResult evolve_timedep(const HamiltonianFn& h, double t0, double t1, const StateVector& psi,
                               const PauliSum& probe, const EvolutionOptions& options = {});

/// One pass with a fixed number of uniform steps; no refinement.
StateVector evolve_fixed_steps(const HamiltonianFn& h, double t0, double t1, const StateVector& psi,
                               std::int64_t steps, Stepper stepper);

struct Eigenpair {
  double energy;
  StateVector vector;
};

Eigen::MatrixXcd to_dense(const PauliSum& h);
/// k lowest eigenpairs by a dense Hermitian solve, energies ascending.
std::vector<Eigenpair> eigensolve_lowest(const PauliSum& h, int k);
/// Full spectrum of a PauliSum, ascending.
Eigen::VectorXd spectrum(const PauliSum& h);

/// exp(-i H t) as a dense matrix through the Hermitian eigendecomposition of H.
Eigen::MatrixXcd dense_propagator(const Eigen::MatrixXcd& h, double t);
Eigen::MatrixXcd dense_propagator(const PauliSum& h, double t);

/// Coefficients Tr(P M)/2^n of every Pauli string of a Hermitian matrix,
/// dropping those below drop_tol. Exponential in n; meant for n <= 6.
PauliSum pauli_decompose(const Eigen::MatrixXcd& m, int nsites, double drop_tol = 0.0);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

}  // namespace adspiral
