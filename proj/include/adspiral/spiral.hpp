#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adspiral/engine.hpp"
#include "adspiral/lattice.hpp"

namespace adspiral {

enum class StartBasis {
  Neel,     ///< Neel state under spiral_hamiltonian
  Flipped,  ///< all-down state under tilde_hamiltonian, flipped back before probing
};

std::string to_string(StartBasis basis);
StartBasis start_basis_from_string(const std::string& name);

struct SpiralConfig {
  LatticeSpec lattice;
  Schedule schedule;
  StartBasis basis = StartBasis::Neel;
  /// Target Hamiltonian; heisenberg(lattice) when empty.
  std::optional<PauliSum> probe;
  EvolutionOptions evolution;

  void validate() const;
  PauliSum resolved_probe() const;
};

/// Low end of a probe spectrum. E1 is the lowest level strictly above the
/// (possibly degenerate) ground level.
struct ReferenceSpectrum {
  double e0 = 0.0;
  double e1 = 0.0;
  std::vector<StateVector> ground_space;

  static constexpr double kDegeneracyTol = 1e-8;
  static ReferenceSpectrum compute(const PauliSum& probe);
  /// Weight of psi in the ground space, in [0, 1].
  double overlap(const StateVector& psi) const;
};

struct SpiralResult {
  EvolutionResult evolution;  ///< energies are probe energies in the Neel frame
  double final_energy = 0.0;
  double overlap = 0.0;
};

SpiralResult run_spiral(const SpiralConfig& cfg, const ReferenceSpectrum& reference);
SpiralResult run_spiral(const SpiralConfig& cfg);

struct SweepPoint {
  double param;
  double energy;
  double overlap;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
  double e0 = 0.0;
  double e1 = 0.0;
};

/// One spiral per drive frequency, everything else taken from cfg.
SweepResult sweep_omega(const SpiralConfig& cfg, const std::vector<double>& omegas, int workers = 1);
/// One spiral per total switching time, everything else taken from cfg.
SweepResult sweep_time(const SpiralConfig& cfg, const std::vector<double>& times, int workers = 1);

/// Operator-norm distance between one drive period 2 pi / omega of
///   H = sum J_ij Z_i Z_j + sum_i (omega/2)(cos th Z_i + sin th X_i) + (h_i/2) Z_i
/// and its stroboscopic approximation
///   U_B^dag exp(-i (2 pi / omega) H_eff) U_B,  U_B = prod_j exp(i th Y_j / 2),
///   H_eff = sum J_ij [cos^2 th Z_i Z_j + sin^2 th (X_i X_j + Y_i Y_j)/2] + sum_i cos th h_i Z_i / 2,
/// after removing the (-1)^n global phase the drive picks up over a period.
/// `penalty` holds h_i and may be empty.
double floquet_deviation(const CouplingMatrix& couplings, double theta, double omega,
                         const std::vector<double>& penalty = {});

/// cos theta = 1/sqrt(3), the tilt at the end of the spiral.
inline const double kSpiralTheta = 0.9553166181245093;

}  // namespace adspiral
