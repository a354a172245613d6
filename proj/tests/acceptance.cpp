// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset. Exit status is 0 only when every run criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adspiral/annealer.hpp"
#include "adspiral/experiment.hpp"
#include "adspiral/optimize.hpp"
#include "adspiral/pulse.hpp"
#include "adspiral/spiral.hpp"
#include "support.hpp"

using namespace adspiral;
using oracle::Mat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fails]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EvolutionOptions spiral_evolution() {
  EvolutionOptions o;
  o.tol = 1e-7;
  o.samples = 50;
  return o;
}

SpiralConfig comb_spiral(double T, double omega, double hp0) {
  SpiralConfig c;
  c.lattice = LatticeSpec::comb(4);
  c.schedule.total_time = T;
  c.schedule.omega = omega;
  c.schedule.hp0 = hp0;
  c.evolution = spiral_evolution();
  return c;
}

Schedule sine_path(double hp0) {
  Schedule s;
  s.form = PathForm::SineAugmented;
  s.betas = {1.0 / std::numbers::pi};
  s.hp0 = hp0;
  return s;
}

double op_norm(const Mat& m) { return Eigen::JacobiSVD<Mat>(m).singularValues()[0]; }

Mat bond_sum(const CouplingMatrix& c, char p) {
  const int n = c.nsites();
  Mat m = Mat::Zero(1 << n, 1 << n);
  for (const auto& b : c.bonds()) m += b.strength * oracle::two(p, b.i, p, b.j, n);
  return m;
}

Outcome exact_energies() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double e0 = eigensolve_lowest(heisenberg_chain(2, 1.0), 1)[0].energy;
  o.require(std::abs(e0 + 3.0) < 1e-10, "two-site E0 = " + fmt("%.12f", e0));
  const auto comb = LatticeSpec::comb(4);
  const double neel = expectation(heisenberg(comb), neel_state(comb));
  o.require(std::abs(neel + 7.0) < 1e-12, "comb L=4 Neel energy = " + fmt("%.12f", neel));
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
  return o;
}

Outcome floquet_order() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> omegas{8, 16, 32, 64};
  std::vector<double> dev;
  const auto c = LatticeSpec::chain(2).couplings();
  for (double w : omegas) dev.push_back(floquet_deviation(c, kSpiralTheta, w));
  const double slope = loglog_slope(omegas, dev);
  o.require(std::abs(slope + 2.0) <= 0.3, "slope " + fmt("%.4f", slope));
  const double dt = seconds_since(t0);
  o.require(dt < 10.0, "runtime " + fmt("%.2f s", dt));
  return o;
}

Outcome omega_sweep() {
  Outcome o;
  SpiralConfig c = comb_spiral(25.0, 8.0, 0.0);
  const std::vector<double> omegas{1, 2, 8, 16, 32};
  const auto r = sweep_omega(c, omegas);
  for (const auto& p : r.points) {
    const std::string e = "E(" + fmt("%g", p.param) + ") = " + fmt("%.4f", p.energy);
    if (p.param <= 2.0) o.require(p.energy > r.e1, e + " > E1");
    if (p.param >= 8.0) o.require(p.energy < r.e1, e + " < E1");
  }
  o.require(r.e0 < r.points[2].energy, "E0 = " + fmt("%.4f", r.e0) + " < E(8)");
  o.detail += "; E1 = " + fmt("%.4f", r.e1);
  return o;
}

Outcome time_sweep() {
  Outcome o;
  SpiralConfig c = comb_spiral(25.0, 8.0, 0.18);
  const std::vector<double> times{5, 10, 15, 20, 25};
  const auto r = sweep_time(c, times);
  bool monotone = true;
  std::string es;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    es += (k ? " " : "") + fmt("%.4f", r.points[k].energy);
    if (k > 0 && r.points[k].energy > r.points[k - 1].energy + 1e-3) monotone = false;
  }
  o.require(monotone, "linear E(T) non-increasing: " + es);
  c.schedule = sine_path(0.18);
  c.schedule.total_time = 25.0;
  c.schedule.omega = 8.0;
  const double sine = run_spiral(c).final_energy;
  const double linear = r.points.back().energy;
  o.require(sine <= linear, "T=25 sine " + fmt("%.4f", sine) + " <= linear " + fmt("%.4f", linear));
  return o;
}

Outcome penalty_optimum() {
  Outcome o;
  SpiralConfig c = comb_spiral(25.0, 8.0, 0.0);
  GoldenOptions g;
  g.lo = 0.0;
  g.hi = 1.0;
  g.xtol = 1e-3;
  const auto r = optimize_penalty(c, g);
  const double hp = r.argmin[0];
  o.require(hp >= 0.13 && hp <= 0.23, "h_P(0) = " + fmt("%.4f", hp));
  const double zero = run_spiral(c).final_energy;
  o.require(r.value < zero, "E = " + fmt("%.5f", r.value) + " < E(h_P=0) = " + fmt("%.5f", zero));
  return o;
}

Outcome pulse_words() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  CouplingMatrix c(2);
  c.add(0, 1, 0.7);
  const Mat xxz = bond_sum(c, 'X') + bond_sum(c, 'Y') + 2.0 * bond_sum(c, 'Z');
  const Mat gz = support::dense(extract_first_order_generator(words::xxz(), c, 1e-3));
  const double rz = op_norm(gz - xxz);
  o.require(rz < 1e-6, "(RX+)^2(RY+)^2 residual " + fmt("%.2e", rz));
  const Mat xxx = 2.0 * (bond_sum(c, 'X') + bond_sum(c, 'Y') + bond_sum(c, 'Z'));
  const Mat gx = support::dense(extract_first_order_generator(words::xxx(), c, 1e-3));
  const double rx = op_norm(gx - xxx);
  o.require(rx < 1e-6, "XXX word residual " + fmt("%.2e", rx));
  const double dt = seconds_since(t0);
  o.require(dt < 10.0, "runtime " + fmt("%.2f s", dt));
  return o;
}

Outcome second_order_identities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double sum_err = 0.0, theta_err = 0.0;
  bool rejected = true;
  for (double omega : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    for (int M = 1; M <= 64; ++M) {
      const auto plan = canonical_second_order_plan(M, omega, 0.18);
      const auto s = second_order_schedule(plan, omega);
      double sum = 0.0;
      for (double d : s.deltas) sum += d;
      sum_err = std::max(sum_err, std::abs(sum - plan.total_time) / plan.total_time);
      theta_err = std::max(theta_err, std::abs(s.total_device_time - 2.0 * plan.total_time) / plan.total_time);
    }
    for (double T : {1.0, 5.0, 25.0}) {
      const int mmax = max_feasible_second_order_steps(T, omega);
      try {
        second_order_schedule(TrotterPlan{mmax + 1, T, 0.0, TrotterOrder::SecondMinimal}, omega);
        rejected = false;
      } catch (const std::invalid_argument&) {
      }
    }
  }
  o.require(sum_err < 1e-14, "sum delta = T, relative error " + fmt("%.1e", sum_err));
  o.require(theta_err < 1e-12, "Theta = 2T, relative error " + fmt("%.1e", theta_err));
  o.require(rejected, "infeasible M rejected");
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
  return o;
}

Outcome trotter_versus_spiral() {
  Outcome o;
  CompareOptions opt;
  opt.spiral = sine_path(0.18);
  opt.trotter_hp = 0.18;
  opt.order = TrotterOrder::First;
  opt.evolution = spiral_evolution();
  opt.evolution.tol = 1e-6;
  std::vector<double> times;
  for (int t = 2; t <= 24; t += 2) times.push_back(t);
  const std::vector<int> steps{4, 8, 16};
  const auto table = compare_protocols(LatticeSpec::comb(4), 8.0, times, steps, opt);

  double first_trotter_win = NAN, last_spiral_win = NAN;
  for (const auto& row : table.rows) {
    const bool trotter_wins = std::any_of(row.trotter_energies.begin(), row.trotter_energies.end(),
                                          [&](double e) { return e < row.spiral_energy; });
    const bool spiral_wins = std::all_of(row.trotter_energies.begin(), row.trotter_energies.end(),
                                         [&](double e) { return row.spiral_energy < e; });
    if (trotter_wins && std::isnan(first_trotter_win)) first_trotter_win = row.total_time;
    if (spiral_wins) last_spiral_win = row.total_time;
  }
  o.require(!std::isnan(first_trotter_win) && !std::isnan(last_spiral_win) && first_trotter_win < last_spiral_win,
            "Trotter wins at T = " + fmt("%g", first_trotter_win) + ", spiral beats every M at T = " +
                fmt("%g", last_spiral_win));
  for (std::size_t m = 0; m < steps.size(); ++m) {
    bool up = false, down = false;
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      const double d = table.rows[k].trotter_energies[m] - table.rows[k - 1].trotter_energies[m];
      up = up || d > 0.0;
      down = down || d < 0.0;
    }
    o.require(up && down, "M = " + std::to_string(steps[m]) + " non-monotone in T");
  }
  return o;
}

Outcome annealer() {
  Outcome o;
  const auto spec = LatticeSpec::comb(4);
  AnnealSchedule sched;
  sched.table = ScheduleTable::synthetic();
  sched.h = 2.0;
  const double s_star = find_s_star(sched.table, sched.h);
  AnnealOptions opt;
  opt.frame = AnnealFrame::Flipped;

  sched.J = sched.Jp = 0.1;
  sched.waypoints = reverse_anneal_waypoints(s_star, 0.13);
  const auto strong = run_reverse_anneal(sched, spec, opt);
  const double lowest = *std::min_element(strong.evolution.energies.begin(), strong.evolution.energies.end());
  o.require(lowest < strong.initial_energy,
            "J=0.1 lowest energy " + fmt("%.4f", lowest) + " < initial " + fmt("%.4f", strong.initial_energy));
  o.require(strong.final_overlap > 0.5, "final overlap " + fmt("%.4f", strong.final_overlap));

  sched.J = sched.Jp = 0.01;
  sched.waypoints = reverse_anneal_waypoints(s_star, 0.5);
  const auto weak = run_reverse_anneal(sched, spec, opt);
  const double mid = 0.5 * (weak.e0 + weak.e1);
  o.require(std::abs(weak.turning_energy - mid) <= 0.1 * std::abs(mid),
            "J=0.01 energy at s* " + fmt("%.4f", weak.turning_energy) + " vs (E0+E1)/2 = " + fmt("%.4f", mid));
  return o;
}

Outcome engine_invariants() {
  Outcome o;
  std::mt19937_64 rng(2024);
  double apply_err = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const PauliSum h = support::random_sum(n, 10, rng);
      const StateVector psi = support::random_state(n, rng);
      const Amplitudes mine = apply_pauli_sum(h, psi);
      apply_err = std::max(apply_err, (mine - support::dense(h) * psi.amplitudes()).cwiseAbs().maxCoeff());
    }
  }

  const int n = 4;
  const PauliSum h = support::random_sum(n, 12, rng);
  const PauliSum h2 = support::random_sum(n, 12, rng);
  const StateVector psi = support::random_state(n, rng);
  EvolutionOptions ev;
  ev.tol = 1e-11;
  ev.samples = 20;
  auto hf = [&](double t) { return h + std::sin(t) * h2; };
  const auto fwd = evolve_timedep(hf, 0.0, 3.0, psi, h, ev);
  const double norm_err = std::abs(fwd.final_state.norm() - 1.0);
  const auto back = evolve_timedep([&](double s) { return -1.0 * hf(3.0 - s); }, 0.0, 3.0, fwd.final_state, h, ev);
  const double rev_err = back.final_state.distance(psi);
  const auto flat = evolve_timedep([&](double) { return h; }, 0.0, 3.0, psi, h, ev);
  double energy_err = 0.0;
  for (double e : flat.energies) energy_err = std::max(energy_err, std::abs(e - flat.energies.front()));

  o.require(norm_err < 1e-10, "norm drift " + fmt("%.1e", norm_err));
  o.require(rev_err < 1e-7, "reversal error " + fmt("%.1e", rev_err));
  o.require(energy_err < 1e-8, "energy drift " + fmt("%.1e", energy_err));
  o.require(apply_err < 1e-12, "apply vs dense " + fmt("%.1e", apply_err));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      exact_energies, floquet_order,           omega_sweep,           time_sweep, penalty_optimum,
      pulse_words,    second_order_identities, trotter_versus_spiral, annealer,   engine_invariants,
  };
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted.empty() && !wanted.contains(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("error: ") + e.what();
    }
    if (!out.pass) ++failures;
    std::printf("criterion %2d: %s (%.1f s) %s\n", id, out.pass ? "PASS" : "FAIL", seconds_since(t0),
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
