#include "doctest.h"

#include <cmath>
#include <numbers>

#include "adspiral/spiral.hpp"
#include "support.hpp"

using namespace adspiral;

namespace {

SpiralConfig two_site(double T, double omega) {
  SpiralConfig c;
  c.lattice = LatticeSpec::chain(2);
  c.schedule.total_time = T;
  c.schedule.omega = omega;
  c.evolution.tol = 1e-9;
  c.evolution.samples = 20;
  return c;
}

}  // namespace

TEST_CASE("reference spectrum of the comb against a dense oracle") {
  const auto spec = LatticeSpec::comb(4);
  const auto ref = ReferenceSpectrum::compute(heisenberg(spec));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(support::dense(heisenberg(spec)));
  CHECK(ref.e0 == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-12));
  CHECK(ref.ground_space.size() == 1);
  CHECK(ref.e1 > ref.e0 + 1e-3);
  CHECK(ref.overlap(ref.ground_space[0]) == doctest::Approx(1.0));
}

TEST_CASE("degenerate ground levels are collected") {
  // Two decoupled singlets: unique ground state; a single bond on 3 sites: two-fold.
  CouplingMatrix c(3);
  c.add(0, 1, 1.0);
  const auto ref = ReferenceSpectrum::compute(heisenberg(c));
  CHECK(ref.ground_space.size() == 2);
  CHECK(ref.e0 == doctest::Approx(-3.0));
  CHECK(ref.e1 == doctest::Approx(1.0));
}

TEST_CASE("spiral trajectory matches an RK4 propagation of the same Hamiltonian") {
  const SpiralConfig c = two_site(3.0, 6.0);
  const auto r = run_spiral(c);
  auto h = [&](double t) { return support::dense(spiral_hamiltonian(c.lattice, c.schedule, t)); };
  const oracle::Vec psi = oracle::propagate_rk4(h, 0.0, 3.0, 40000) * neel_state(2).amplitudes();
  CHECK((r.evolution.final_state.amplitudes() - psi).norm() < 1e-7);
  CHECK(r.evolution.energies.front() == doctest::Approx(-1.0));
}

TEST_CASE("Neel and flipped bases give the same physics") {
  SpiralConfig c;
  c.lattice = LatticeSpec::comb(2);
  c.schedule.total_time = 6.0;
  c.schedule.hp0 = 0.3;
  c.evolution.tol = 1e-9;
  const auto a = run_spiral(c);
  c.basis = StartBasis::Flipped;
  const auto b = run_spiral(c);
  CHECK(a.final_energy == doctest::Approx(b.final_energy).epsilon(1e-7));
  CHECK(a.overlap == doctest::Approx(b.overlap).epsilon(1e-7));
  CHECK(start_basis_from_string(to_string(StartBasis::Flipped)) == StartBasis::Flipped);
  CHECK_THROWS_AS(start_basis_from_string("up"), std::invalid_argument);
}

TEST_CASE("the staggered penalty lifts the exchange symmetry") {
  // Without it the drive commutes with the site swap and the singlet weight stays 1/2.
  const auto plain = run_spiral(two_site(30.0, 16.0));
  CHECK(plain.final_energy == doctest::Approx(-1.0).epsilon(1e-6));
  SpiralConfig c = two_site(30.0, 16.0);
  c.schedule.hp0 = 0.5;
  const auto slow = run_spiral(c);
  c.schedule.total_time = 2.0;
  const auto fast = run_spiral(c);
  CHECK(slow.final_energy < fast.final_energy);
  CHECK(slow.final_energy < -2.9);
}

TEST_CASE("sweeps are independent of the worker count") {
  SpiralConfig c = two_site(4.0, 8.0);
  const std::vector<double> omegas{2.0, 4.0, 8.0, 16.0};
  const auto serial = sweep_omega(c, omegas, 1);
  const auto parallel = sweep_omega(c, omegas, 3);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    CHECK(serial.points[k].param == omegas[k]);
    CHECK(serial.points[k].energy == parallel.points[k].energy);
  }
  CHECK(serial.e0 == doctest::Approx(-3.0));
  const auto times = sweep_time(c, {1.0, 2.0}, 2);
  CHECK(times.axis == "T");
  CHECK_THROWS_AS(sweep_time(c, {2.0, 1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sweep_omega(c, {0.0, 1.0}, 1), std::invalid_argument);
}

TEST_CASE("Floquet deviation against a Pade oracle") {
  const double theta = kSpiralTheta;
  for (double omega : {8.0, 20.0}) {
    const int n = 2;
    oracle::Mat h = oracle::two('Z', 0, 'Z', 1, n);
    oracle::Mat eff = std::cos(theta) * std::cos(theta) * oracle::two('Z', 0, 'Z', 1, n) +
                      0.5 * std::sin(theta) * std::sin(theta) *
                          (oracle::two('X', 0, 'X', 1, n) + oracle::two('Y', 0, 'Y', 1, n));
    oracle::Mat rot = oracle::Mat::Zero(4, 4);
    for (int i = 0; i < n; ++i) {
      h += 0.5 * omega * (std::cos(theta) * oracle::one('Z', i, n) + std::sin(theta) * oracle::one('X', i, n));
      rot += -0.5 * theta * oracle::one('Y', i, n);
    }
    const double period = 2.0 * std::numbers::pi / omega;
    const oracle::Mat ub = oracle::expm(rot, 1.0);
    const oracle::Mat approx = ub.adjoint() * oracle::expm(eff, period) * ub;
    const oracle::Mat diff = oracle::expm(h, period) - approx;
    Eigen::JacobiSVD<oracle::Mat> svd(diff);
    CHECK(floquet_deviation(LatticeSpec::chain(2).couplings(), theta, omega) ==
          doctest::Approx(svd.singularValues()[0]).epsilon(1e-9));
  }
}

TEST_CASE("Floquet deviation shrinks with the drive and rejects bad input") {
  const auto c = LatticeSpec::chain(3).couplings();
  const double d8 = floquet_deviation(c, kSpiralTheta, 8.0, {0.1, -0.1, 0.1});
  const double d32 = floquet_deviation(c, kSpiralTheta, 32.0, {0.1, -0.1, 0.1});
  CHECK(d32 < d8 / 8.0);
  CHECK_THROWS_AS(floquet_deviation(c, kSpiralTheta, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(floquet_deviation(c, kSpiralTheta, 8.0, {0.1}), std::invalid_argument);
}
