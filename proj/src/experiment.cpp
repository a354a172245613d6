#include "adspiral/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include "adspiral/io.hpp"
#include "adspiral/parallel.hpp"

namespace adspiral {

namespace {

using json = nlohmann::ordered_json;

class Writer {
 public:
  explicit Writer(const RunContext& ctx) : ctx_(ctx) {}

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(ctx_.out_dir / name, header, rows);
    done(name);
  }
  void text(const std::string& name, const std::string& contents) {
    write_atomic(ctx_.out_dir / name, contents);
    done(name);
  }
  void json_file(const std::string& name, const json& value) {
    write_json(ctx_.out_dir / name, value);
    done(name);
  }
  void log(const std::string& msg) const {
    if (ctx_.log) *ctx_.log << msg << '\n';
  }
  std::vector<std::string> artifacts;

 private:
  void done(const std::string& name) {
    artifacts.push_back(name);
    log("wrote " + (ctx_.out_dir / name).string());
  }
  const RunContext& ctx_;
};

std::vector<std::vector<double>> trajectory(const EvolutionResult& ev) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < ev.times.size(); ++k) rows.push_back({ev.times[k], ev.energies[k]});
  return rows;
}

SpiralConfig spiral_config(const ExperimentConfig& cfg) {
  return SpiralConfig{cfg.lattice, cfg.schedule, cfg.basis, std::nullopt, cfg.evolution};
}

json run_spiral_cmd(const ExperimentConfig& cfg, Writer& w) {
  const SpiralConfig sc = spiral_config(cfg);
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(sc.resolved_probe());
  const SpiralResult r = run_spiral(sc, ref);
  w.csv("spiral.csv", {"t", "energy"}, trajectory(r.evolution));
  return {{"final_energy", r.final_energy}, {"ground_overlap", r.overlap}, {"e0", ref.e0}, {"e1", ref.e1},
          {"steps", r.evolution.steps},       {"refinement_error", r.evolution.refinement_error}};
}

json run_sweep_cmd(const ExperimentConfig& cfg, const RunContext& ctx, Writer& w) {
  const bool omega = cfg.command == Command::SweepOmega;
  const SpiralConfig sc = spiral_config(cfg);
  const SweepResult r =
      omega ? sweep_omega(sc, cfg.sweep_values, ctx.workers) : sweep_time(sc, cfg.sweep_values, ctx.workers);
  std::vector<std::vector<double>> rows;
  for (const auto& p : r.points) rows.push_back({p.param, p.energy, p.overlap});
  w.csv("sweep.csv", {omega ? "omega" : "T", "energy", "ground_overlap"}, rows);
  return {{"axis", r.axis}, {"e0", r.e0}, {"e1", r.e1}};
}

json run_optimize_hp_cmd(const ExperimentConfig& cfg, Writer& w) {
  const OptimizeResult r = optimize_penalty(spiral_config(cfg), cfg.golden);
  std::vector<std::vector<double>> rows;
  for (const auto& e : r.trace) rows.push_back({e.x[0], e.value});
  w.csv("optimize_hp.csv", {"hp0", "energy"}, rows);
  return {{"hp0", r.argmin[0]}, {"energy", r.value}, {"iterations", r.iterations}};
}

json run_optimize_path_cmd(const ExperimentConfig& cfg, Writer& w) {
  const OptimizeResult r = optimize_path(spiral_config(cfg), cfg.path);
  std::vector<std::string> header;
  for (int n = 1; n < cfg.path.count; ++n) header.push_back("beta_" + std::to_string(n));
  header.push_back("energy");
  std::vector<std::vector<double>> rows;
  for (const auto& e : r.trace) {
    rows.push_back(e.x);
    rows.back().push_back(e.value);
  }
  w.csv("optimize_path.csv", header, rows);
  return {{"betas", r.argmin}, {"energy", r.value}, {"iterations", r.iterations}};
}

json run_trotter_cmd(const ExperimentConfig& cfg, Writer& w) {
  const auto& t = cfg.trotter;
  const PulseDevice device = device_for(cfg.lattice, t.omega);
  const PauliSum probe = heisenberg(cfg.lattice);
  const TrotterResult r = run_trotter(t.plan, device, neel_state(cfg.lattice), probe, t.ideal);
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(probe);
  w.csv("trotter.csv", {"t", "energy"}, trajectory(r.evolution));
  w.text("sequence.txt", r.plan.sequence.to_text());
  return {{"final_energy", r.final_energy}, {"device_time", r.device_time},
          {"gates", r.plan.sequence.gates.size()}, {"e0", ref.e0}, {"e1", ref.e1}};
}

json run_compare_cmd(const ExperimentConfig& cfg, const RunContext& ctx, Writer& w) {
  CompareOptions opts = cfg.compare.options;
  opts.workers = ctx.workers;
  const CompareTable table = compare_protocols(cfg.lattice, cfg.compare.omega, cfg.compare.times,
                                               cfg.compare.steps, opts);
  std::vector<std::string> header{"T", "spiral"};
  for (int m : table.steps) header.push_back("trotter_M" + std::to_string(m));
  for (int m : table.steps) header.push_back("device_time_M" + std::to_string(m));
  std::vector<std::vector<double>> rows;
  for (const auto& row : table.rows) {
    std::vector<double> r{row.total_time, row.spiral_energy};
    r.insert(r.end(), row.trotter_energies.begin(), row.trotter_energies.end());
    r.insert(r.end(), row.trotter_device_times.begin(), row.trotter_device_times.end());
    rows.push_back(std::move(r));
  }
  w.csv("compare.csv", header, rows);
  return {{"e0", table.e0}, {"e1", table.e1}, {"coherence_limit", table.coherence_limit}};
}

json run_anneal_cmd(const ExperimentConfig& cfg, Writer& w) {
  const AnnealResult r = run_reverse_anneal(cfg.anneal.schedule, cfg.lattice, cfg.anneal.options);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.evolution.times.size(); ++k) {
    rows.push_back({r.evolution.times[k], r.s_values[k], r.evolution.energies[k]});
  }
  w.csv("anneal.csv", {"t_us", "s", "energy_J"}, rows);
  double s_star = std::nan("");
  try {
    s_star = find_s_star(cfg.anneal.schedule.table, cfg.anneal.schedule.h);
  } catch (const std::invalid_argument&) {
  }
  return {{"s_star", s_star},
          {"initial_energy", r.initial_energy},
          {"turning_energy", r.turning_energy},
          {"turning_time", r.turning_time},
          {"final_energy", r.evolution.energies.back()},
          {"final_overlap", r.final_overlap},
          {"e0", r.e0},
          {"e1", r.e1},
          {"steps", r.evolution.steps}};
}

json run_floquet_cmd(const ExperimentConfig& cfg, const RunContext& ctx, Writer& w) {
  const auto& f = cfg.floquet;
  const CouplingMatrix couplings = cfg.lattice.couplings();
  const auto dev = parallel_map(f.omegas.size(), ctx.workers, [&](std::size_t k) {
    return floquet_deviation(couplings, f.theta, f.omegas[k], f.penalty);
  });
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < dev.size(); ++k) rows.push_back({f.omegas[k], dev[k]});
  w.csv("floquet.csv", {"omega", "deviation"}, rows);
  json out{{"theta", f.theta}};
  out["loglog_slope"] = f.omegas.size() >= 2 ? loglog_slope(f.omegas, dev) : std::nan("");
  return out;
}

json run_eigensolve_cmd(const ExperimentConfig& cfg, Writer& w) {
  const PauliSum probe = heisenberg(cfg.lattice);
  const auto pairs = eigensolve_lowest(probe, cfg.eigen_count);
  const ReferenceSpectrum ref = ReferenceSpectrum::compute(probe);
  std::vector<double> levels;
  for (const auto& p : pairs) levels.push_back(p.energy);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < levels.size(); ++k) rows.push_back({static_cast<double>(k), levels[k]});
  w.csv("levels.csv", {"index", "energy"}, rows);
  return {{"e0", ref.e0}, {"e1", ref.e1}, {"ground_degeneracy", ref.ground_space.size()}, {"levels", levels}};
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return (n * sxy - sx * sy) / denom;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunContext& ctx) {
  if (ctx.workers < 1) throw std::invalid_argument("workers must be at least 1");
  Writer w(ctx);
  w.log("running " + to_string(cfg.command));
  json summary;
  switch (cfg.command) {
    case Command::Spiral:
      summary = run_spiral_cmd(cfg, w);
      break;
    case Command::SweepOmega:
    case Command::SweepTime:
      summary = run_sweep_cmd(cfg, ctx, w);
      break;
    case Command::OptimizeHp:
      summary = run_optimize_hp_cmd(cfg, w);
      break;
    case Command::OptimizePath:
      summary = run_optimize_path_cmd(cfg, w);
      break;
    case Command::Trotter:
      summary = run_trotter_cmd(cfg, w);
      break;
    case Command::Compare:
      summary = run_compare_cmd(cfg, ctx, w);
      break;
    case Command::Anneal:
      summary = run_anneal_cmd(cfg, w);
      break;
    case Command::FloquetCheck:
      summary = run_floquet_cmd(cfg, ctx, w);
      break;
    case Command::Eigensolve:
      summary = run_eigensolve_cmd(cfg, w);
      break;
  }
  w.json_file("result.json", summary);
  json manifest;
  manifest["version"] = ADSPIRAL_VERSION;
  manifest["command"] = to_string(cfg.command);
  manifest["artifacts"] = w.artifacts;
  manifest["config"] = cfg.to_json();
  w.json_file("manifest.json", manifest);
  return RunReport{w.artifacts, summary};
}

}  // namespace adspiral
