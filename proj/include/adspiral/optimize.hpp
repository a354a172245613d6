#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adspiral/spiral.hpp"

namespace adspiral {

struct Evaluation {
  std::vector<double> x;
  double value;
};

struct OptimizeResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  /// Every objective evaluation in the order it happened.
  std::vector<Evaluation> trace;
};

struct GoldenOptions {
  double lo = 0.0;
  double hi = 1.0;
  /// Stop when the bracket is narrower than xtol.
  double xtol = 1e-4;
  int max_iterations = 30;
};

/// Golden-section minimisation of a unimodal function on [lo, hi].
/// Throws ConvergenceError if the bracket is still wider than xtol after
/// max_iterations reductions.
OptimizeResult golden_section(const std::function<double(double)>& fn, const GoldenOptions& options = {});

/// Minimises the final spiral energy over h_P(0) in the bracket, which must
/// lie inside [0, omega].
OptimizeResult optimize_penalty(const SpiralConfig& cfg, const GoldenOptions& options = {});

struct PathOptions {
  /// Number of path coefficients is count - 1 (beta_1 .. beta_{count-1}).
  int count = 2;
  /// Upper bound on f(t) over the whole path.
  double max_drive = kSpiralEndTilt;
  double initial_step = 0.1;
  /// Stop when the simplex size drops below this.
  double size_tol = 1e-4;
  int max_iterations = 200;
  /// Independent simplex searches from the linear path; the first uses the
  /// positive step on every axis, later ones draw step signs from the seed.
  int restarts = 1;
  std::uint64_t seed = 0;
};

/// Rescales betas towards zero until max_f <= max_drive. Returns the scale in [0, 1].
double project_path(Schedule& sched, double max_drive);

/// Simplex search over beta_1 .. beta_{count-1} of the sine-augmented path,
/// each trial point projected onto the drive constraint before evaluation.
/// argmin holds the projected coefficients. Throws std::invalid_argument if
/// even the linear path violates the constraint.
OptimizeResult optimize_path(const SpiralConfig& cfg, const PathOptions& options = {});

}  // namespace adspiral
