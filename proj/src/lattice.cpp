#include "adspiral/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adspiral {

namespace {

void check_time(double t, double T) {
  const double slack = 1e-12 * std::max(1.0, std::abs(T));
  if (!(t >= -slack && t <= T + slack)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
  }
}

PauliString zz(int i, int j) { return PauliString{{i, Axis::Z}, {j, Axis::Z}}; }
PauliString xx(int i, int j) { return PauliString{{i, Axis::X}, {j, Axis::X}}; }
PauliString yy(int i, int j) { return PauliString{{i, Axis::Y}, {j, Axis::Y}}; }

}  // namespace

CouplingMatrix::CouplingMatrix(int nsites) : nsites_(nsites) {
  if (nsites < 0) throw std::invalid_argument("negative site count");
}

void CouplingMatrix::add(int i, int j, double strength) {
  if (i == j) throw std::invalid_argument("self-coupling on site " + std::to_string(i));
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= nsites_) throw std::out_of_range("bond outside the lattice");
  auto it = std::lower_bound(bonds_.begin(), bonds_.end(), std::pair{i, j},
                             [](const Bond& b, const std::pair<int, int>& k) {
                               return std::pair{b.i, b.j} < k;
                             });
  if (it != bonds_.end() && it->i == i && it->j == j) {
    it->strength += strength;
  } else {
    bonds_.insert(it, Bond{i, j, strength});
  }
}

double CouplingMatrix::operator()(int i, int j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  for (const auto& b : bonds_) {
    if (b.i == i && b.j == j) return b.strength;
  }
  return 0.0;
}

CouplingMatrix CouplingMatrix::scaled(double factor) const {
  CouplingMatrix out = *this;
  for (auto& b : out.bonds_) b.strength *= factor;
  return out;
}

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Chain: return "chain";
    case LatticeKind::Comb: return "comb";
    case LatticeKind::Custom: return "custom";
  }
  return "?";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
  if (name == "chain") return LatticeKind::Chain;
  if (name == "comb") return LatticeKind::Comb;
  if (name == "custom") return LatticeKind::Custom;
  throw std::invalid_argument("unknown lattice kind '" + name + "' (expected chain, comb or custom)");
}

LatticeSpec LatticeSpec::chain(int length, double J) {
  LatticeSpec s;
  s.kind = LatticeKind::Chain;
  s.length = length;
  s.J = J;
  s.validate();
  return s;
}

LatticeSpec LatticeSpec::comb(int length, double J, double Jp) {
  LatticeSpec s;
  s.kind = LatticeKind::Comb;
  s.length = length;
  s.J = J;
  s.Jp = Jp;
  s.validate();
  return s;
}

LatticeSpec LatticeSpec::custom(CouplingMatrix couplings, std::vector<int> stagger) {
  LatticeSpec s;
  s.kind = LatticeKind::Custom;
  s.length = couplings.nsites();
  s.custom_couplings = std::move(couplings);
  s.custom_stagger = std::move(stagger);
  s.validate();
  return s;
}

void LatticeSpec::validate() const {
  if (length < 2) throw std::invalid_argument("lattice length must be at least 2");
  if (!std::isfinite(J) || !std::isfinite(Jp)) throw std::invalid_argument("couplings must be finite");
  if (kind == LatticeKind::Custom) {
    if (!custom_couplings) throw std::invalid_argument("custom lattice needs a coupling matrix");
    if (custom_couplings->nsites() != length) {
      throw std::invalid_argument("custom coupling matrix size does not match the lattice length");
    }
    if (!custom_stagger.empty()) {
      if (static_cast<int>(custom_stagger.size()) != length) {
        throw std::invalid_argument("custom staggering pattern has the wrong length");
      }
      for (int s : custom_stagger) {
        if (s != 1 && s != -1) throw std::invalid_argument("staggering signs must be +1 or -1");
      }
    }
  }
  if (nsites() > PauliString::kMaxSites) throw std::invalid_argument("lattice exceeds 64 sites");
}

int LatticeSpec::nsites() const { return kind == LatticeKind::Comb ? 2 * length : length; }

int comb_site(int x, int y) { return 2 * x + (y - 1); }

CouplingMatrix LatticeSpec::couplings() const {
  switch (kind) {
    case LatticeKind::Chain: {
      CouplingMatrix c(length);
      for (int j = 0; j + 1 < length; ++j) c.add(j, j + 1, J);
      return c;
    }
    case LatticeKind::Comb: {
      CouplingMatrix c(2 * length);
      for (int x = 0; x < length; ++x) {
        if (x + 1 < length) c.add(comb_site(x, 1), comb_site(x + 1, 1), J);
        c.add(comb_site(x, 1), comb_site(x, 2), Jp);
      }
      return c;
    }
    case LatticeKind::Custom:
      return *custom_couplings;
  }
  return CouplingMatrix(0);
}

std::vector<int> LatticeSpec::stagger() const {
  std::vector<int> s(nsites());
  if (kind == LatticeKind::Comb) {
    for (int x = 0; x < length; ++x) {
      for (int y = 1; y <= 2; ++y) s[comb_site(x, y)] = (x + y) % 2 == 0 ? 1 : -1;
    }
    return s;
  }
  if (kind == LatticeKind::Custom && !custom_stagger.empty()) return custom_stagger;
  for (int j = 0; j < nsites(); ++j) s[j] = j % 2 == 0 ? -1 : 1;
  return s;
}

double LatticeSpec::spiral_ising_prefactor() const { return kind == LatticeKind::Comb ? 0.25 : 1.0; }

std::string to_string(PathForm form) { return form == PathForm::Linear ? "linear" : "sine"; }

PathForm path_form_from_string(const std::string& name) {
  if (name == "linear") return PathForm::Linear;
  if (name == "sine" || name == "sine-augmented") return PathForm::SineAugmented;
  throw std::invalid_argument("unknown path form '" + name + "' (expected linear or sine)");
}

void Schedule::validate() const {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) throw std::invalid_argument("T must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive");
  if (!std::isfinite(hp0)) throw std::invalid_argument("hp0 must be finite");
  for (double b : betas) {
    if (!std::isfinite(b)) throw std::invalid_argument("path coefficients must be finite");
  }
  if (form == PathForm::Linear && !betas.empty()) {
    throw std::invalid_argument("linear path takes no sine coefficients");
  }
}

double Schedule::f(double t) const {
  check_time(t, total_time);
  const double u = std::clamp(t / total_time, 0.0, 1.0);
  double shape = u;
  if (form == PathForm::SineAugmented) {
    for (std::size_t n = 1; n <= betas.size(); ++n) {
      shape += betas[n - 1] * std::sin(static_cast<double>(n) * std::numbers::pi * u);
    }
  }
  return kSpiralEndTilt * shape;
}

double Schedule::hp(double t) const {
  check_time(t, total_time);
  const double u = std::clamp(t / total_time, 0.0, 1.0);
  return hp0 * (1.0 - u);
}

double Schedule::max_f() const {
  if (form == PathForm::Linear || betas.empty()) return kSpiralEndTilt;
  constexpr int kGrid = 4096;
  int best = 0;
  double best_value = f(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = f(total_time * k / kGrid);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  // Golden refinement inside the neighbouring grid cells.
  double a = total_time * std::max(0, best - 1) / kGrid;
  double b = total_time * std::min(kGrid, best + 1) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({best_value, fc, fd});
}

PauliSum heisenberg(const CouplingMatrix& couplings) {
  PauliSum h(couplings.nsites());
  for (const auto& b : couplings.bonds()) {
    h.add(b.strength, xx(b.i, b.j));
    h.add(b.strength, yy(b.i, b.j));
    h.add(b.strength, zz(b.i, b.j));
  }
  return h;
}

PauliSum heisenberg(const LatticeSpec& spec) {
  spec.validate();
  return heisenberg(spec.couplings());
}

PauliSum heisenberg_chain(int length, double J) { return heisenberg(LatticeSpec::chain(length, J)); }

PauliSum heisenberg_comb(const LatticeSpec& spec) {
  if (spec.kind != LatticeKind::Comb) throw std::invalid_argument("heisenberg_comb needs a comb lattice");
  return heisenberg(spec);
}

PauliSum spiral_hamiltonian(const LatticeSpec& spec, const Schedule& sched, double t) {
  const double f = sched.f(t);
  const double hp = sched.hp(t);
  const double c = spec.spiral_ising_prefactor();
  const auto stagger = spec.stagger();
  const auto couplings = spec.couplings();
  PauliSum h(spec.nsites());
  for (const auto& b : couplings.bonds()) h.add(c * b.strength, zz(b.i, b.j));
  const double zdrive = 0.5 * sched.omega / std::sqrt(3.0);
  const double xdrive = 0.5 * sched.omega * f;
  for (int i = 0; i < spec.nsites(); ++i) {
    h.add(zdrive + 0.5 * hp * stagger[i], PauliString::z(i));
    h.add(xdrive, PauliString::x(i));
  }
  return h;
}

PauliSum tilde_hamiltonian(const LatticeSpec& spec, const Schedule& sched, double t) {
  const double f = sched.f(t);
  const double hp = sched.hp(t);
  const double c = spec.spiral_ising_prefactor();
  const auto s = spec.stagger();
  const auto couplings = spec.couplings();
  PauliSum h(spec.nsites());
  for (const auto& b : couplings.bonds()) h.add(c * b.strength * s[b.i] * s[b.j], zz(b.i, b.j));
  const double zdrive = 0.5 * sched.omega / std::sqrt(3.0);
  const double xdrive = 0.5 * sched.omega * f;
  for (int i = 0; i < spec.nsites(); ++i) {
    h.add(zdrive * s[i] + 0.5 * hp, PauliString::z(i));
    h.add(xdrive, PauliString::x(i));
  }
  return h;
}

PauliString neel_flip(const LatticeSpec& spec) {
  const auto s = spec.stagger();
  std::uint64_t mask = 0;
  for (int i = 0; i < spec.nsites(); ++i) {
    if (s[i] < 0) mask |= std::uint64_t{1} << i;
  }
  return PauliString::from_masks(mask, 0);
}

PauliSum linear_adiabatic(const CouplingMatrix& couplings, std::span<const int> stagger, double hP,
                          double t, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  check_time(t, T);
  if (static_cast<int>(stagger.size()) != couplings.nsites()) {
    throw std::invalid_argument("staggering pattern does not match the coupling matrix");
  }
  const double u = std::clamp(t / T, 0.0, 1.0);
  PauliSum h(couplings.nsites());
  for (const auto& b : couplings.bonds()) {
    h.add(b.strength, zz(b.i, b.j));
    h.add(b.strength * u, xx(b.i, b.j));
    h.add(b.strength * u, yy(b.i, b.j));
  }
  for (int i = 0; i < couplings.nsites(); ++i) h.add(hP * (1.0 - u) * stagger[i], PauliString::z(i));
  return h;
}

CouplingMatrix rydberg_couplings(std::span<const Point2> positions, double V0) {
  const int n = static_cast<int>(positions.size());
  CouplingMatrix c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = positions[i][0] - positions[j][0];
      const double dy = positions[i][1] - positions[j][1];
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        throw std::invalid_argument("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
      c.add(i, j, V0 / (r2 * r2 * r2));
    }
  }
  return c;
}

std::vector<Point2> comb_rydberg_layout(int length, double spacing) {
  if (length < 2) throw std::invalid_argument("comb length must be at least 2");
  std::vector<Point2> pos(2 * length);
  for (int x = 0; x < length; ++x) {
    pos[comb_site(x, 1)] = {x * spacing, 0.0};
    pos[comb_site(x, 2)] = {x * spacing, (x % 2 == 0 ? 1.0 : -1.0) * spacing};
  }
  return pos;
}

}  // namespace adspiral
