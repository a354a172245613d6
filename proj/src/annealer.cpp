#include "adspiral/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "adspiral/errors.hpp"
#include "adspiral/spiral.hpp"

namespace adspiral {

ScheduleTable::ScheduleTable(std::vector<double> s, std::vector<double> a, std::vector<double> b)
    : s_(std::move(s)), a_(std::move(a)), b_(std::move(b)) {
  if (s_.size() != a_.size() || s_.size() != b_.size()) throw std::invalid_argument("schedule columns differ in length");
  if (s_.size() < 2) throw std::invalid_argument("schedule table needs at least two rows");
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (!std::isfinite(s_[k]) || !std::isfinite(a_[k]) || !std::isfinite(b_[k])) {
      throw std::invalid_argument("schedule row " + std::to_string(k) + " is not finite");
    }
    if (s_[k] < 0.0 || s_[k] > 1.0) throw std::invalid_argument("schedule s outside [0, 1]");
    if (a_[k] < 0.0 || b_[k] < 0.0) throw std::invalid_argument("schedule A and B must be non-negative");
    if (k > 0 && !(s_[k] > s_[k - 1])) throw std::invalid_argument("schedule s must be strictly increasing");
  }
}

ScheduleTable ScheduleTable::from_text(const std::string& text) {
  std::vector<double> s, a, b;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream row(line);
    double v[3];
    if (!(row >> v[0])) continue;
    if (!(row >> v[1] >> v[2])) throw ConfigError("schedule row needs three columns: s A B", lineno);
    std::string extra;
    if (row >> extra) throw ConfigError("unexpected text '" + extra + "' after s A B", lineno);
    s.push_back(v[0]);
    a.push_back(v[1]);
    b.push_back(v[2]);
  }
  try {
    return ScheduleTable(std::move(s), std::move(a), std::move(b));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ScheduleTable ScheduleTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

ScheduleTable ScheduleTable::synthetic(int knots) {
  if (knots < 2) throw std::invalid_argument("synthetic schedule needs at least two knots");
  std::vector<double> s, a, b;
  for (int k = 0; k < knots; ++k) {
    const double x = static_cast<double>(k) / (knots - 1);
    s.push_back(x);
    a.push_back(5000.0 * (1.0 - x) * (1.0 - x));
    b.push_back(5000.0 * (0.1 + 0.9 * x));
  }
  return ScheduleTable(std::move(s), std::move(a), std::move(b));
}

std::size_t ScheduleTable::segment(double s) const {
  if (s_.empty()) throw std::logic_error("empty schedule table");
  if (!(s >= s_.front() && s <= s_.back())) {
    throw std::out_of_range("s = " + std::to_string(s) + " outside the schedule table");
  }
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const auto k = static_cast<std::size_t>(it - s_.begin());
  return std::clamp<std::size_t>(k, 1, s_.size() - 1) - 1;
}

namespace {

double lerp_at(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t k, double x) {
  const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
  if (w == 0.0) return ys[k];
  if (w == 1.0) return ys[k + 1];
  return ys[k] + w * (ys[k + 1] - ys[k]);
}

}  // namespace

double ScheduleTable::A(double s) const { return lerp_at(s_, a_, segment(s), s); }
double ScheduleTable::B(double s) const { return lerp_at(s_, b_, segment(s), s); }

std::string ScheduleTable::to_text() const {
  std::string out = "# s A(s)/MHz B(s)/MHz\n";
  char buf[96];
  for (std::size_t k = 0; k < s_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", s_[k], a_[k], b_[k]);
    out += buf;
  }
  return out;
}

void AnnealSchedule::validate() const {
  if (table.s().size() < 2) throw std::invalid_argument("anneal schedule has no A/B table");
  if (waypoints.size() < 2) throw std::invalid_argument("anneal schedule needs at least two waypoints");
  if (!std::isfinite(h) || !std::isfinite(J) || !std::isfinite(Jp)) {
    throw std::invalid_argument("h, J and Jp must be finite");
  }
  if (!(max_slew >= 0.0)) throw std::invalid_argument("max_slew must be non-negative");
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    const auto& w = waypoints[k];
    if (!std::isfinite(w.time)) throw std::invalid_argument("waypoint time is not finite");
    if (!(w.s >= table.s().front() && w.s <= table.s().back())) {
      throw std::invalid_argument("waypoint s = " + std::to_string(w.s) + " outside the schedule table");
    }
    if (k == 0) continue;
    const auto& prev = waypoints[k - 1];
    if (!(w.time > prev.time)) throw std::invalid_argument("waypoint times must be strictly increasing");
    const double slew = std::abs(w.s - prev.s) / (w.time - prev.time);
    if (max_slew > 0.0 && slew > max_slew * (1.0 + 1e-12)) {
      throw std::invalid_argument("segment " + std::to_string(k) + " slews at " + std::to_string(slew) +
                                  "/us, above the limit " + std::to_string(max_slew) + "/us");
    }
  }
}

double AnnealSchedule::s_at(double t) const {
  if (waypoints.empty()) throw std::logic_error("anneal schedule has no waypoints");
  if (!(t >= start_time() && t <= end_time())) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the waypoint span");
  }
  const auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                   [](double x, const Waypoint& w) { return x < w.time; });
  const auto k = std::clamp<std::ptrdiff_t>(it - waypoints.begin(), 1, std::ssize(waypoints) - 1) - 1;
  const auto& a = waypoints[k];
  const auto& b = waypoints[k + 1];
  const double w = (t - a.time) / (b.time - a.time);
  if (w == 1.0) return b.s;
  return a.s + w * (b.s - a.s);
}

std::vector<Waypoint> reverse_anneal_waypoints(double s_star, double ramp, double hold) {
  if (!(ramp > 0.0) || !(hold >= 0.0)) throw std::invalid_argument("ramp must be positive and hold non-negative");
  std::vector<Waypoint> w{{0.0, 1.0}, {ramp, s_star}};
  if (hold > 0.0) w.push_back({ramp + hold, s_star});
  w.push_back({2.0 * ramp + hold, 1.0});
  return w;
}

CouplingMatrix programmed_couplings(const AnnealSchedule& sched, const LatticeSpec& spec) {
  if (spec.kind == LatticeKind::Custom) return spec.couplings();
  LatticeSpec programmed = spec;
  programmed.J = sched.J;
  programmed.Jp = sched.Jp;
  return programmed.couplings();
}

PauliSum build_dwave_hamiltonian(const AnnealSchedule& sched, const CouplingMatrix& couplings,
                                 std::span<const int> stagger, double t) {
  const int n = couplings.nsites();
  if (static_cast<int>(stagger.size()) != n) throw std::invalid_argument("stagger needs one sign per site");
  const double s = sched.s_at(t);
  const double a = std::numbers::pi * sched.table.A(s);
  const double b = std::numbers::pi * sched.table.B(s);
  PauliSum out(n);
  for (int i = 0; i < n; ++i) {
    if (a != 0.0) out.add(-a, PauliString::x(i));
    if (b != 0.0 && sched.h != 0.0) out.add(b * sched.h * stagger[i], PauliString::z(i));
  }
  if (b != 0.0) {
    for (const auto& bond : couplings.bonds()) {
      out.add(b * bond.strength, PauliString{{bond.i, Axis::Z}, {bond.j, Axis::Z}});
    }
  }
  return out;
}

PauliSum build_dwave_hamiltonian(const AnnealSchedule& sched, const LatticeSpec& spec, double t) {
  const auto stagger = spec.stagger();
  return build_dwave_hamiltonian(sched, programmed_couplings(sched, spec), stagger, t);
}

double find_s_star(const ScheduleTable& table, double h) {
  const auto& s = table.s();
  const double r = std::sqrt(2.0) * h;
  auto g = [&](double x) { return table.A(x) - r * table.B(x); };
  std::vector<double> gk;
  for (double x : s) gk.push_back(g(x));

  int crossings = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool exact = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (gk[k] == 0.0) {
      if (k + 1 < s.size() && gk[k + 1] == 0.0) throw std::invalid_argument("no unique crossing: A - sqrt(2) h B vanishes on an interval");
      ++crossings;
      lo = hi = s[k];
      exact = true;
    } else if (k + 1 < s.size() && gk[k + 1] != 0.0 && (gk[k] < 0.0) != (gk[k + 1] < 0.0)) {
      ++crossings;
      lo = s[k];
      hi = s[k + 1];
      exact = false;
    }
  }
  if (crossings == 0) throw std::invalid_argument("no crossing of A(s) = sqrt(2) h B(s) in the table");
  if (crossings > 1) {
    throw std::invalid_argument("no unique crossing: A(s) = sqrt(2) h B(s) holds at " + std::to_string(crossings) +
                                " points");
  }
  if (exact) return lo;
  const bool rising = g(lo) < 0.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ((g(mid) < 0.0) == rising ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(AnnealFrame frame) { return frame == AnnealFrame::Flipped ? "flipped" : "literal"; }

AnnealFrame anneal_frame_from_string(const std::string& name) {
  if (name == "flipped") return AnnealFrame::Flipped;
  if (name == "literal") return AnnealFrame::Literal;
  throw std::invalid_argument("unknown anneal frame '" + name + "' (expected flipped or literal)");
}

namespace {

// X on the sites the Neel state has pointing down (s_i = +1).
PauliString neel_down_flip(const LatticeSpec& spec) {
  const auto s = spec.stagger();
  std::uint64_t mask = 0;
  for (int i = 0; i < spec.nsites(); ++i) {
    if (s[i] > 0) mask |= std::uint64_t{1} << i;
  }
  return PauliString::from_masks(mask, 0);
}

}  // namespace

PauliSum anneal_probe(const AnnealSchedule& sched, const LatticeSpec& spec, AnnealFrame frame) {
  PauliSum probe(spec.nsites());
  switch (spec.kind) {
    case LatticeKind::Chain:
      probe = heisenberg_chain(spec.length, 1.0);
      break;
    case LatticeKind::Comb:
      if (sched.J == 0.0) throw std::invalid_argument("J = 0 leaves no energy unit");
      probe = heisenberg(LatticeSpec::comb(spec.length, 1.0, sched.Jp / sched.J));
      break;
    case LatticeKind::Custom:
      probe = heisenberg(spec);
      break;
  }
  if (frame == AnnealFrame::Flipped) probe = probe.conjugated_by(neel_down_flip(spec));
  return probe;
}

StateVector anneal_start_state(const LatticeSpec& spec, AnnealFrame frame) {
  if (frame == AnnealFrame::Literal) return neel_state(spec);
  return apply_pauli_string(neel_down_flip(spec), neel_state(spec));
}

AnnealResult run_reverse_anneal(const AnnealSchedule& sched, const LatticeSpec& spec, const AnnealOptions& options) {
  spec.validate();
  sched.validate();
  if (!(options.coupling_noise >= 0.0)) throw std::invalid_argument("coupling noise must be non-negative");
  const double a_scale = *std::max_element(sched.table.a().begin(), sched.table.a().end());
  for (const auto& w : {sched.waypoints.front(), sched.waypoints.back()}) {
    if (sched.table.A(w.s) > 1e-12 * a_scale) {
      throw std::invalid_argument("the program must start and end where A(s) = 0; A(" + std::to_string(w.s) +
                                  ") = " + std::to_string(sched.table.A(w.s)) + " MHz");
    }
  }

  CouplingMatrix couplings = programmed_couplings(sched, spec);
  if (options.coupling_noise > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, options.coupling_noise);
    CouplingMatrix noisy(couplings.nsites());
    for (const auto& b : couplings.bonds()) noisy.add(b.i, b.j, b.strength + noise(rng));
    couplings = std::move(noisy);
  }
  const auto stagger = spec.stagger();
  const PauliSum probe = anneal_probe(sched, spec, options.frame);
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(probe);

  AnnealResult out;
  out.e0 = ref.e0;
  out.e1 = ref.e1;
  out.initial_state = anneal_start_state(spec, options.frame);
  auto hamiltonian = [&](double t) { return build_dwave_hamiltonian(sched, couplings, stagger, t); };

  StateVector psi = out.initial_state;
  auto& ev = out.evolution;
  for (std::size_t k = 0; k + 1 < sched.waypoints.size(); ++k) {
    EvolutionResult seg = evolve_timedep(hamiltonian, sched.waypoints[k].time, sched.waypoints[k + 1].time, psi,
                                         probe, options.evolution);
    const std::size_t first = k == 0 ? 0 : 1;
    ev.times.insert(ev.times.end(), seg.times.begin() + first, seg.times.end());
    ev.energies.insert(ev.energies.end(), seg.energies.begin() + first, seg.energies.end());
    ev.steps += seg.steps;
    ev.refinement_error += seg.refinement_error;
    psi = std::move(seg.final_state);
  }
  ev.final_state = psi;

  for (double t : ev.times) out.s_values.push_back(sched.s_at(t));
  out.initial_energy = ev.energies.front();
  const auto turn = std::min_element(out.s_values.begin(), out.s_values.end()) - out.s_values.begin();
  out.turning_energy = ev.energies[turn];
  out.turning_time = ev.times[turn];
  out.final_overlap = std::norm(out.initial_state.inner(psi));
  return out;
}

}  // namespace adspiral
