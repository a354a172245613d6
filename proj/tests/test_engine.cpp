#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "adspiral/engine.hpp"
#include "adspiral/errors.hpp"
#include "support.hpp"

using namespace adspiral;

TEST_CASE("apply_pauli_sum matches the dense oracle") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      const PauliSum h = support::random_sum(n, 8, rng);
      const StateVector psi = support::random_state(n, rng);
      const oracle::Vec want = support::dense(h) * psi.amplitudes();
      CHECK((apply_pauli_sum(h, psi) - want).norm() < 1e-12);
      CHECK(expectation(h, psi) == doctest::Approx(psi.amplitudes().dot(want).real()).epsilon(1e-12));
      CHECK((to_dense(h) - support::dense(h)).norm() < 1e-12);
    }
  }
}

TEST_CASE("identity terms shift the operator") {
  PauliSum h(2);
  h.add(0.75, PauliString());
  h.add(1.0, PauliString::x(1));
  const CompiledOperator op(h);
  CHECK(op.shift() == 0.75);
  const StateVector psi = StateVector::basis(2, 0);
  CHECK(expectation(op, psi) == doctest::Approx(0.75));
}

TEST_CASE("basis states") {
  CHECK(neel_state(4).amplitudes()[0b1010] == Complex(1.0));
  CHECK(all_down_state(3).amplitudes()[7] == Complex(1.0));
  const auto spec = LatticeSpec::comb(2);
  const auto s = spec.stagger();
  const auto neel = neel_state(spec);
  for (int i = 0; i < spec.nsites(); ++i) {
    PauliSum z(spec.nsites());
    z.add(1.0, PauliString::z(i));
    CHECK(expectation(z, neel) == doctest::Approx(-s[i]));
  }
}

TEST_CASE("evolve_const matches a Pade matrix exponential") {
  std::mt19937_64 rng(5);
  for (double dt : {0.01, 0.7, -1.3, 25.0, 400.0}) {
    const PauliSum h = support::random_sum(3, 10, rng);
    const StateVector psi = support::random_state(3, rng);
    const oracle::Vec want = oracle::expm(support::dense(h), dt) * psi.amplitudes();
    const StateVector got = evolve_const(h, dt, psi);
    CHECK((got.amplitudes() - want).norm() < 1e-10 * std::max(1.0, std::abs(dt)));
  }
}

TEST_CASE("a half Rabi cycle flips the spin") {
  PauliSum h(1);
  h.add(0.5, PauliString::x(0));
  const StateVector out = evolve_const(h, std::numbers::pi, StateVector::basis(1, 0));
  CHECK(std::abs(out[0]) < 1e-14);
  CHECK(std::abs(out[1] - Complex(0, -1)) < 1e-14);
}

TEST_CASE("diagonal operators are exponentiated exactly") {
  PauliSum h(2);
  h.add(0.3, PauliString{{0, Axis::Z}, {1, Axis::Z}});
  h.add(-1.1, PauliString::z(1));
  h.add(2.0, PauliString());
  std::mt19937_64 rng(8);
  const StateVector psi = support::random_state(2, rng);
  const oracle::Vec want = oracle::expm(support::dense(h), 1e4) * psi.amplitudes();
  CHECK((evolve_const(h, 1e4, psi).amplitudes() - want).norm() < 1e-9);
}

namespace {

PauliSum driven(double t) {
  PauliSum h(3);
  h.add(1.0, PauliString{{0, Axis::Z}, {1, Axis::Z}});
  h.add(0.7, PauliString{{1, Axis::Z}, {2, Axis::Z}});
  for (int i = 0; i < 3; ++i) {
    h.add(2.0 * std::cos(t), PauliString::x(i));
    h.add(0.5 * t, PauliString::z(i));
  }
  return h;
}

}  // namespace

TEST_CASE("time-dependent evolution matches an RK4 propagator") {
  std::mt19937_64 rng(9);
  const StateVector psi = support::random_state(3, rng);
  PauliSum probe(3);
  probe.add(1.0, PauliString::x(0));
  for (Stepper stepper : {Stepper::CommutatorFree4, Stepper::Midpoint}) {
    EvolutionOptions o;
    o.tol = 1e-9;
    o.samples = 10;
    o.stepper = stepper;
    const EvolutionResult r = evolve_timedep(driven, 0.0, 3.0, psi, probe, o);
    const oracle::Mat u = oracle::propagate_rk4([](double t) { return support::dense(driven(t)); }, 0.0, 3.0, 20000);
    CHECK((r.final_state.amplitudes() - u * psi.amplitudes()).norm() < 1e-8);
    CHECK(r.energies.size() == 11);
    CHECK(r.times.back() == 3.0);
    CHECK(r.refinement_error <= 1e-9);
  }
}

TEST_CASE("CF4 converges at fourth order") {
  std::mt19937_64 rng(10);
  const StateVector psi = support::random_state(3, rng);
  const StateVector ref = evolve_fixed_steps(driven, 0.0, 2.0, psi, 4096, Stepper::CommutatorFree4);
  const double e1 = evolve_fixed_steps(driven, 0.0, 2.0, psi, 32, Stepper::CommutatorFree4).distance(ref);
  const double e2 = evolve_fixed_steps(driven, 0.0, 2.0, psi, 64, Stepper::CommutatorFree4).distance(ref);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("evolution invariants") {
  std::mt19937_64 rng(12);
  const StateVector psi = support::random_state(4, rng);
  const PauliSum h = support::random_sum(4, 12, rng);
  const PauliSum h2 = support::random_sum(4, 12, rng);
  EvolutionOptions o;
  o.tol = 1e-11;
  o.samples = 20;

  SUBCASE("norm is preserved") {
    const auto r = evolve_timedep([&](double t) { return h + std::sin(t) * h2; }, 0.0, 5.0, psi, h, o);
    CHECK(std::abs(r.final_state.norm() - 1.0) < 1e-10);
  }
  SUBCASE("constant H conserves energy") {
    const auto r = evolve_timedep([&](double) { return h; }, 0.0, 5.0, psi, h, o);
    for (double e : r.energies) CHECK(std::abs(e - r.energies.front()) < 1e-8);
  }
  SUBCASE("forward then backward returns the state") {
    auto hf = [](double t) { return driven(t); };
    PauliSum probe(3);
    const StateVector p3 = support::random_state(3, rng);
    const auto fwd = evolve_timedep(hf, 0.0, 2.0, p3, probe, o);
    // Reverse: psi(0) = U(0, 2) psi(2), i.e. H'(s) = -H(2 - s).
    const auto back = evolve_timedep([&](double s) { return -1.0 * hf(2.0 - s); }, 0.0, 2.0, fwd.final_state, probe, o);
    CHECK(back.final_state.distance(p3) < 1e-7);
  }
}

TEST_CASE("evolution reports an exhausted step budget") {
  EvolutionOptions o;
  o.tol = 1e-14;
  o.samples = 4;
  o.max_steps = 64;
  PauliSum probe(3);
  CHECK_THROWS_AS(evolve_timedep(driven, 0.0, 3.0, StateVector::basis(3, 0), probe, o), ConvergenceError);
  CHECK_THROWS_AS(evolve_timedep(driven, 1.0, 1.0, StateVector::basis(3, 0), probe, o), std::invalid_argument);
}

TEST_CASE("two-site Heisenberg singlet") {
  const auto levels = eigensolve_lowest(heisenberg_chain(2, 1.0), 4);
  CHECK(levels[0].energy == doctest::Approx(-3.0).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(levels[k].energy == doctest::Approx(1.0).epsilon(1e-12));
  const oracle::Mat h = support::dense(heisenberg_chain(2, 1.0));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
  CHECK(spectrum(heisenberg_chain(2, 1.0))[0] == doctest::Approx(es.eigenvalues()[0]));
}

TEST_CASE("Pauli decomposition inverts the dense map") {
  std::mt19937_64 rng(13);
  const PauliSum h = support::random_sum(3, 9, rng);
  CHECK(pauli_decompose(to_dense(h), 3, 1e-14).approx_equal(h, 1e-13));
}

TEST_CASE("dense propagator and operator norm") {
  std::mt19937_64 rng(14);
  const PauliSum h = support::random_sum(2, 5, rng);
  CHECK((dense_propagator(h, 0.9) - oracle::expm(support::dense(h), 0.9)).norm() < 1e-12);
  oracle::Mat m = oracle::Mat::Zero(2, 2);
  m(0, 1) = 3.0;
  m(1, 0) = Complex(0, 1);
  CHECK(operator_norm(m) == doctest::Approx(3.0));
}
