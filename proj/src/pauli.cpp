#include "adspiral/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adspiral {

namespace {

std::uint64_t site_bit(int site) {
  if (site < 0 || site >= PauliString::kMaxSites) {
    throw std::out_of_range("Pauli site index " + std::to_string(site) + " outside [0, 64)");
  }
  return std::uint64_t{1} << site;
}

Axis axis_of(bool x, bool z) { return x ? (z ? Axis::Y : Axis::X) : Axis::Z; }

// Phase exponent k of a * b = i^k c for single-site axes a != b.
int cyclic_phase(Axis a, Axis b) {
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  return (ib - ia + 3) % 3 == 1 ? 1 : 3;
}

char axis_char(Axis a) { return a == Axis::X ? 'X' : (a == Axis::Y ? 'Y' : 'Z'); }

}  // namespace

PauliString::PauliString(std::initializer_list<std::pair<int, Axis>> sites)
    : PauliString(std::span<const std::pair<int, Axis>>(sites.begin(), sites.size())) {}

PauliString::PauliString(std::span<const std::pair<int, Axis>> sites) {
  int previous = -1;
  for (const auto& [site, axis] : sites) {
    if (site <= previous) {
      throw std::invalid_argument("Pauli string sites must be strictly increasing");
    }
    previous = site;
    const std::uint64_t bit = site_bit(site);
    if (axis != Axis::Z) x_ |= bit;
    if (axis != Axis::X) z_ |= bit;
  }
}

PauliString PauliString::single(int site, Axis axis) { return PauliString{{site, axis}}; }

PauliString PauliString::from_masks(std::uint64_t x_mask, std::uint64_t z_mask, int phase_exponent) {
  PauliString p;
  p.x_ = x_mask;
  p.z_ = z_mask;
  p.phase_ = static_cast<std::uint8_t>(((phase_exponent % 4) + 4) % 4);
  return p;
}

std::vector<std::pair<int, Axis>> PauliString::sites() const {
  std::vector<std::pair<int, Axis>> out;
  std::uint64_t support = x_ | z_;
  while (support != 0) {
    const int site = std::countr_zero(support);
    const std::uint64_t bit = std::uint64_t{1} << site;
    out.emplace_back(site, axis_of(x_ & bit, z_ & bit));
    support &= support - 1;
  }
  return out;
}

std::complex<double> PauliString::phase() const {
  static constexpr std::complex<double> kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowers[phase_];
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::max_site() const {
  const std::uint64_t support = x_ | z_;
  return support == 0 ? -1 : 63 - std::countl_zero(support);
}

bool PauliString::commutes_with(const PauliString& other) const {
  // Symplectic product: count sites where the two factors anticommute.
  const int anti = std::popcount((x_ & other.z_) ^ (z_ & other.x_));
  return anti % 2 == 0;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  int phase = a.phase_ + b.phase_;
  std::uint64_t overlap = (a.x_ | a.z_) & (b.x_ | b.z_);
  while (overlap != 0) {
    const std::uint64_t bit = overlap & (~overlap + 1);
    const Axis pa = axis_of(a.x_ & bit, a.z_ & bit);
    const Axis pb = axis_of(b.x_ & bit, b.z_ & bit);
    if (pa != pb) phase += cyclic_phase(pa, pb);
    overlap &= overlap - 1;
  }
  return PauliString::from_masks(a.x_ ^ b.x_, a.z_ ^ b.z_, phase);
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.x_ != b.x_) return a.x_ < b.x_;
  if (a.z_ != b.z_) return a.z_ < b.z_;
  return a.phase_ < b.phase_;
}

std::string PauliString::to_string() const {
  static constexpr const char* kPrefix[4] = {"", "i", "-", "-i"};
  std::ostringstream os;
  os << kPrefix[phase_];
  const auto factors = sites();
  if (factors.empty()) {
    os << 'I';
    return os.str();
  }
  bool first = true;
  for (const auto& [site, axis] : factors) {
    if (!first) os << ' ';
    os << axis_char(axis) << site;
    first = false;
  }
  return os.str();
}

PauliSum::PauliSum(int nsites) : nsites_(nsites) {
  if (nsites < 0 || nsites > PauliString::kMaxSites) {
    throw std::invalid_argument("PauliSum site count must lie in [0, 64]");
  }
}

PauliSum::PauliSum(int nsites, std::span<const PauliTerm> terms) : PauliSum(nsites) {
  for (const auto& t : terms) add(t.coefficient, t.string);
}

void PauliSum::add(double coefficient, const PauliString& string) {
  if (string.max_site() >= nsites_) {
    throw std::invalid_argument("Pauli string " + string.to_string() + " exceeds " +
                                std::to_string(nsites_) + " sites");
  }
  switch (string.phase_exponent()) {
    case 0:
      break;
    case 2:
      coefficient = -coefficient;
      break;
    default:
      throw std::invalid_argument("imaginary-phase string " + string.to_string() +
                                  " would make the sum non-Hermitian");
  }
  const PauliString key = string.without_phase();
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const PauliTerm& t, const PauliString& k) { return t.string < k; });
  if (it != terms_.end() && it->string == key) {
    it->coefficient += coefficient;
    if (it->coefficient == 0.0) terms_.erase(it);
  } else if (coefficient != 0.0) {
    terms_.insert(it, PauliTerm{coefficient, key});
  }
}

double PauliSum::coefficient(const PauliString& string) const {
  const PauliString key = string.without_phase();
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const PauliTerm& t, const PauliString& k) { return t.string < k; });
  if (it == terms_.end() || !(it->string == key)) return 0.0;
  // Ask for -P and you get minus the stored coefficient of P.
  return string.phase_exponent() == 2 ? -it->coefficient : it->coefficient;
}

bool PauliSum::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PauliTerm& t) { return t.string.is_diagonal(); });
}

double PauliSum::norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

PauliSum PauliSum::conjugated_by(const PauliString& p) const {
  PauliSum out(nsites_);
  for (const auto& t : terms_) {
    out.add(p.commutes_with(t.string) ? t.coefficient : -t.coefficient, t.string);
  }
  return out;
}

double PauliSum::max_difference(const PauliSum& other) const {
  double worst = 0.0;
  for (const auto& t : terms_) worst = std::max(worst, std::abs(t.coefficient - other.coefficient(t.string)));
  for (const auto& t : other.terms_) worst = std::max(worst, std::abs(t.coefficient - coefficient(t.string)));
  return worst;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.nsites_ > nsites_) nsites_ = other.nsites_;
  for (const auto& t : other.terms_) add(t.coefficient, t.string);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  if (other.nsites_ > nsites_) nsites_ = other.nsites_;
  for (const auto& t : other.terms_) add(-t.coefficient, t.string);
  return *this;
}

PauliSum& PauliSum::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coefficient *= s;
  return *this;
}

std::string PauliSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << (t.coefficient < 0 ? " - " : " + ");
    else if (t.coefficient < 0) os << '-';
    os << std::abs(t.coefficient) << ' ' << t.string.to_string();
    first = false;
  }
  return os.str();
}

}  // namespace adspiral
