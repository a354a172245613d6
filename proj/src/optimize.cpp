#include "adspiral/optimize.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include <gsl/gsl_multimin.h>

#include "adspiral/errors.hpp"

namespace adspiral {

OptimizeResult golden_section(const std::function<double(double)>& fn, const GoldenOptions& options) {
  if (!(options.hi > options.lo)) throw std::invalid_argument("golden section needs lo < hi");
  if (!(options.xtol > 0.0)) throw std::invalid_argument("golden section needs xtol > 0");
  static const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  OptimizeResult out;
  auto eval = [&](double x) {
    const double v = fn(x);
    out.trace.push_back(Evaluation{{x}, v});
    return v;
  };
  double a = options.lo;
  double b = options.hi;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > options.xtol) {
    if (out.iterations == options.max_iterations) {
      throw ConvergenceError("golden section bracket still " + std::to_string(b - a) + " wide after " +
                             std::to_string(options.max_iterations) + " iterations");
    }
    ++out.iterations;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(d);
    }
  }
  const Evaluation* best = &out.trace.front();
  for (const auto& e : out.trace) {
    if (e.value < best->value) best = &e;
  }
  out.argmin = best->x;
  out.value = best->value;
  return out;
}

OptimizeResult optimize_penalty(const SpiralConfig& cfg, const GoldenOptions& options) {
  cfg.validate();
  if (options.lo < 0.0 || options.hi > cfg.schedule.omega) {
    throw std::invalid_argument("penalty bracket must lie inside [0, omega]");
  }
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(cfg.resolved_probe());
  return golden_section(
      [&](double hp0) {
        SpiralConfig trial = cfg;
        trial.schedule.hp0 = hp0;
        return run_spiral(trial, ref).final_energy;
      },
      options);
}

double project_path(Schedule& sched, double max_drive) {
  constexpr double kSlack = 1e-12;
  if (max_drive + kSlack < kSpiralEndTilt) {
    throw std::invalid_argument("drive bound " + std::to_string(max_drive) + " is below the end tilt sqrt(2/3)");
  }
  if (sched.max_f() <= max_drive + kSlack) return 1.0;
  const std::vector<double> original = sched.betas;
  auto feasible = [&](double scale) {
    for (std::size_t k = 0; k < original.size(); ++k) sched.betas[k] = scale * original[k];
    return sched.max_f() <= max_drive + kSlack;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  feasible(lo);
  return lo;
}

namespace {

struct PathObjective {
  const SpiralConfig* cfg;
  const ReferenceSpectrum* ref;
  double max_drive;
  OptimizeResult* out;

  double operator()(const gsl_vector* x) const {
    SpiralConfig trial = *cfg;
    trial.schedule.form = PathForm::SineAugmented;
    trial.schedule.betas.resize(x->size);
    for (std::size_t k = 0; k < x->size; ++k) trial.schedule.betas[k] = gsl_vector_get(x, k);
    project_path(trial.schedule, max_drive);
    const double e = run_spiral(trial, *ref).final_energy;
    out->trace.push_back(Evaluation{trial.schedule.betas, e});
    return e;
  }
};

double path_trampoline(const gsl_vector* x, void* params) { return (*static_cast<PathObjective*>(params))(x); }

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

OptimizeResult optimize_path(const SpiralConfig& cfg, const PathOptions& options) {
  if (options.count < 2) throw std::invalid_argument("path optimisation needs count >= 2");
  if (options.restarts < 1) throw std::invalid_argument("path optimisation needs at least one restart");
  if (!(options.initial_step > 0.0)) throw std::invalid_argument("initial simplex step must be positive");
  if (options.max_drive + 1e-12 < kSpiralEndTilt) {
    throw std::invalid_argument("infeasible drive constraint: max drive " + std::to_string(options.max_drive) +
                                " < sqrt(2/3)");
  }
  cfg.validate();
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(cfg.resolved_probe());
  const std::size_t dim = static_cast<std::size_t>(options.count - 1);

  OptimizeResult out;
  PathObjective objective{&cfg, &ref, options.max_drive, &out};
  gsl_multimin_function fn{&path_trampoline, dim, &objective};
  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution coin(0.5);

  for (int r = 0; r < options.restarts; ++r) {
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_calloc(dim));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      const double sign = (r == 0 || coin(rng)) ? 1.0 : -1.0;
      gsl_vector_set(step.get(), k, sign * options.initial_step);
    }
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
    gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());
    int status = GSL_CONTINUE;
    int it = 0;
    while (status == GSL_CONTINUE && it < options.max_iterations) {
      ++it;
      if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
      status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), options.size_tol);
    }
    out.iterations += it;
    if (status != GSL_SUCCESS) {
      throw ConvergenceError("simplex search did not shrink below " + std::to_string(options.size_tol) + " in " +
                             std::to_string(options.max_iterations) + " iterations");
    }
  }
  const Evaluation* best = &out.trace.front();
  for (const auto& e : out.trace) {
    if (e.value < best->value) best = &e;
  }
  out.argmin = best->x;
  out.value = best->value;
  return out;
}

}  // namespace adspiral
