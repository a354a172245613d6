#include "doctest.h"

#include <random>

#include "adspiral/pauli.hpp"
#include "support.hpp"

using namespace adspiral;

namespace {

oracle::Mat dense_string(const PauliString& p, int n) { return p.phase() * oracle::string(support::ops_of(p, n)); }

}  // namespace

TEST_CASE("single-site products follow the Pauli algebra") {
  const auto x = PauliString::x(0), y = PauliString::y(0), z = PauliString::z(0);
  CHECK(x * y == PauliString::from_masks(0, 1, 1));  // iZ
  CHECK(y * z == PauliString::from_masks(1, 0, 1));  // iX
  CHECK(z * x == PauliString::from_masks(1, 1, 1));  // iY
  CHECK(y * x == PauliString::from_masks(0, 1, 3));  // -iZ
  CHECK((x * x).is_identity());
  CHECK((y * y).is_identity());
}

TEST_CASE("string products and commutation agree with dense matrices") {
  constexpr int n = 3;
  for (std::uint64_t a = 0; a < 64; ++a) {
    for (std::uint64_t b = 0; b < 64; ++b) {
      const auto p = PauliString::from_masks(a & 7, a >> 3);
      const auto q = PauliString::from_masks(b & 7, b >> 3);
      const oracle::Mat pq = dense_string(p, n) * dense_string(q, n);
      CHECK((dense_string(p * q, n) - pq).norm() < 1e-14);
      const oracle::Mat comm = pq - dense_string(q, n) * dense_string(p, n);
      CHECK(p.commutes_with(q) == (comm.norm() < 1e-14));
    }
  }
}

TEST_CASE("strings reject unsorted or repeated sites") {
  CHECK_THROWS_AS((PauliString{{1, Axis::X}, {0, Axis::Z}}), std::invalid_argument);
  CHECK_THROWS_AS((PauliString{{2, Axis::X}, {2, Axis::Z}}), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::x(64), std::out_of_range);
}

TEST_CASE("string formatting") {
  CHECK(PauliString().to_string() == "I");
  CHECK((PauliString{{0, Axis::X}, {3, Axis::Z}}).to_string() == "X0 Z3");
  CHECK(PauliString::from_masks(0, 1, 2).to_string() == "-Z0");
  CHECK(PauliString().is_identity());
  CHECK((PauliString{{1, Axis::Y}, {4, Axis::X}}).weight() == 2);
  CHECK((PauliString{{1, Axis::Y}, {4, Axis::X}}).max_site() == 4);
}

TEST_CASE("sums merge like terms, fold signs and drop zeros") {
  PauliSum h(2);
  h.add(1.5, PauliString::z(0));
  h.add(-0.5, PauliString::z(0));
  h.add(2.0, PauliString::from_masks(1, 0, 2));  // -X0
  h.add(0.25, PauliString::x(1));
  h.add(-0.25, PauliString::x(1));
  CHECK(h.size() == 2);
  CHECK(h.coefficient(PauliString::z(0)) == 1.0);
  CHECK(h.coefficient(PauliString::x(0)) == -2.0);
  CHECK(h.coefficient(PauliString::x(1)) == 0.0);
  CHECK_THROWS_AS(h.add(1.0, PauliString::from_masks(1, 0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(h.add(1.0, PauliString::z(2)), std::invalid_argument);
}

TEST_CASE("sum arithmetic and conjugation match dense algebra") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const PauliSum a = support::random_sum(3, 6, rng);
    const PauliSum b = support::random_sum(3, 6, rng);
    CHECK((support::dense(a + b) - (support::dense(a) + support::dense(b))).norm() < 1e-13);
    CHECK((support::dense(a - 2.0 * b) - (support::dense(a) - 2.0 * support::dense(b))).norm() < 1e-13);
    const auto p = PauliString::from_masks(rng() & 7, rng() & 7);
    const oracle::Mat dp = dense_string(p, 3);
    CHECK((support::dense(a.conjugated_by(p)) - dp * support::dense(a) * dp.adjoint()).norm() < 1e-13);
  }
}

TEST_CASE("norm bound and comparison helpers") {
  PauliSum a(2), b(2);
  a.add(1.0, PauliString::z(0));
  a.add(-2.0, PauliString::x(1));
  b.add(1.0, PauliString::z(0));
  b.add(-2.0 + 1e-9, PauliString::x(1));
  CHECK(a.norm_bound() == 3.0);
  CHECK(a.approx_equal(b, 1e-8));
  CHECK_FALSE(a.approx_equal(b, 1e-10));
  CHECK(a.is_diagonal() == false);
}
