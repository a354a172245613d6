#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adspiral {

enum class Axis : std::uint8_t { X, Y, Z };

/// Tensor product of single-site Pauli operators with a phase i^k.
///
/// Stored as a pair of bit masks over at most 64 sites: site j carries X when
/// only the x bit is set, Z when only the z bit is set and Y when both are.
/// The empty string with phase 1 is the identity.
class PauliString {
 public:
  static constexpr int kMaxSites = 64;

  PauliString() = default;
  PauliString(std::initializer_list<std::pair<int, Axis>> sites);
  explicit PauliString(std::span<const std::pair<int, Axis>> sites);

  static PauliString single(int site, Axis axis);
  static PauliString x(int site) { return single(site, Axis::X); }
  static PauliString y(int site) { return single(site, Axis::Y); }
  static PauliString z(int site) { return single(site, Axis::Z); }
  static PauliString from_masks(std::uint64_t x_mask, std::uint64_t z_mask, int phase_exponent = 0);

  /// (site, axis) pairs with strictly increasing site index.
  std::vector<std::pair<int, Axis>> sites() const;
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  /// k such that phase() == i^k, in [0, 4).
  int phase_exponent() const { return phase_; }
  std::complex<double> phase() const;
  /// Number of non-identity factors.
  int weight() const;
  /// Largest site index carrying a factor, or -1 for the identity.
  int max_site() const;
  bool is_identity() const { return x_ == 0 && z_ == 0 && phase_ == 0; }
  bool is_diagonal() const { return x_ == 0; }

  PauliString without_phase() const { return from_masks(x_, z_, 0); }
  bool commutes_with(const PauliString& other) const;

  friend PauliString operator*(const PauliString& a, const PauliString& b);
  friend bool operator==(const PauliString&, const PauliString&) = default;
  /// Orders by (x mask, z mask, phase); used to keep sums canonical.
  friend bool operator<(const PauliString& a, const PauliString& b);

  /// "X0 Z3", with a leading "-", "i" or "-i" for non-unit phases; "I" for identity.
  std::string to_string() const;

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  std::uint8_t phase_ = 0;
};

struct PauliTerm {
  double coefficient;
  PauliString string;  ///< always carries phase 1
};

/// Real-weighted sum of Hermitian Pauli strings on a fixed number of sites.
///
/// Terms are kept sorted and merged, so two sums describing the same operator
/// compare equal term by term. Signs of +-1 phases are folded into the
/// coefficient; strings with phase +-i are rejected since they would make the
/// sum non-Hermitian. Exact zero coefficients are dropped.
class PauliSum {
 public:
  explicit PauliSum(int nsites = 0);
  PauliSum(int nsites, std::span<const PauliTerm> terms);

  int nsites() const { return nsites_; }
  std::span<const PauliTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(double coefficient, const PauliString& string);
  double coefficient(const PauliString& string) const;
  bool is_diagonal() const;
  /// Sum of |coefficient|, an upper bound on the spectral radius.
  double norm_bound() const;

  /// p * H * p^dagger for a Pauli string p; stays real because Pauli strings
  /// either commute or anticommute.
  PauliSum conjugated_by(const PauliString& p) const;
  /// Largest coefficient difference across the union of terms.
  double max_difference(const PauliSum& other) const;
  bool approx_equal(const PauliSum& other, double tol) const { return max_difference(other) <= tol; }

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(double s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, double s) { return a *= s; }
  friend PauliSum operator*(double s, PauliSum a) { return a *= s; }

  std::string to_string() const;

 private:
  int nsites_;
  std::vector<PauliTerm> terms_;
};

}  // namespace adspiral
