#include "doctest.h"

#include <cmath>
#include <numbers>

#include "adspiral/errors.hpp"
#include "adspiral/optimize.hpp"

using namespace adspiral;

TEST_CASE("golden section finds a parabola minimum") {
  GoldenOptions o;
  o.lo = -1.0;
  o.hi = 2.0;
  o.xtol = 1e-8;
  o.max_iterations = 100;
  const auto r = golden_section([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, o);
  CHECK(r.argmin[0] == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations + 2));
}

TEST_CASE("golden section reports its iteration cap") {
  GoldenOptions o;
  o.xtol = 1e-12;
  o.max_iterations = 5;
  CHECK_THROWS_AS(golden_section([](double x) { return x * x; }, o), ConvergenceError);
  o.hi = o.lo;
  CHECK_THROWS_AS(golden_section([](double x) { return x * x; }, o), std::invalid_argument);
}

TEST_CASE("penalty search agrees with a scan on two sites") {
  SpiralConfig c;
  c.lattice = LatticeSpec::chain(2);
  c.schedule.total_time = 3.0;
  c.schedule.omega = 8.0;
  c.evolution.tol = 1e-8;
  GoldenOptions o;
  o.lo = 0.0;
  o.hi = 4.0;
  o.xtol = 1e-3;
  const auto r = optimize_penalty(c, o);
  double best = 1e9;
  for (int k = 0; k <= 40; ++k) {
    SpiralConfig t = c;
    t.schedule.hp0 = 0.1 * k;
    best = std::min(best, run_spiral(t).final_energy);
  }
  CHECK(r.value <= best + 1e-6);
  o.hi = 9.0;
  CHECK_THROWS_AS(optimize_penalty(c, o), std::invalid_argument);
}

TEST_CASE("projection shrinks the path onto the drive cap") {
  Schedule s;
  s.form = PathForm::SineAugmented;
  s.betas = {0.2};
  CHECK(project_path(s, kSpiralEndTilt) == 1.0);
  s.betas = {0.6};
  const double scale = project_path(s, kSpiralEndTilt);
  CHECK(scale < 1.0);
  CHECK(s.betas[0] == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));
  CHECK(s.max_f() <= kSpiralEndTilt + 1e-12);
  CHECK_THROWS_AS(project_path(s, 0.5), std::invalid_argument);
}

TEST_CASE("path search respects the cap and is reproducible") {
  SpiralConfig c;
  c.lattice = LatticeSpec::chain(2);
  c.schedule.total_time = 2.0;
  c.schedule.omega = 8.0;
  c.evolution.tol = 1e-7;
  PathOptions o;
  o.size_tol = 1e-3;
  o.restarts = 2;
  o.seed = 4;
  const auto a = optimize_path(c, o);
  const auto b = optimize_path(c, o);
  CHECK(a.argmin == b.argmin);
  CHECK(a.value == b.value);
  SpiralConfig linear = c;
  CHECK(a.value <= run_spiral(linear).final_energy + 1e-12);
  Schedule s;
  s.form = PathForm::SineAugmented;
  s.betas = a.argmin;
  CHECK(s.max_f() <= kSpiralEndTilt + 1e-9);
  o.max_drive = 0.5;
  CHECK_THROWS_AS(optimize_path(c, o), std::invalid_argument);
  o.max_drive = kSpiralEndTilt;
  o.count = 1;
  CHECK_THROWS_AS(optimize_path(c, o), std::invalid_argument);
}
