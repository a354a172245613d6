#include "adspiral/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "adspiral/errors.hpp"

namespace adspiral {

namespace {

const std::map<Command, std::string>& command_names() {
  static const std::map<Command, std::string> names{
      {Command::Spiral, "spiral"},          {Command::SweepOmega, "sweep-omega"},
      {Command::SweepTime, "sweep-time"},   {Command::OptimizeHp, "optimize-hp"},
      {Command::OptimizePath, "optimize-path"}, {Command::Trotter, "trotter"},
      {Command::Compare, "compare"},        {Command::Anneal, "anneal"},
      {Command::FloquetCheck, "floquet-check"}, {Command::Eigensolve, "eigensolve"},
  };
  return names;
}

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : -1; }

// A YAML mapping whose keys are checked off as they are read; finish()
// rejects whatever is left.
class Block {
 public:
  Block(YAML::Node node, std::string name) : node_(std::move(node)), name_(std::move(name)) {
    if (!node_.IsMap()) throw ConfigError("'" + name_ + "' must be a mapping", line_of(node_));
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  int line() const { return line_of(node_); }

  YAML::Node node(const std::string& key) {
    seen_.insert(key);
    const YAML::Node n = node_[key];
    if (!n) throw ConfigError("'" + name_ + "' is missing '" + key + "'", line());
    return n;
  }

  template <class T>
  T get(const std::string& key) {
    const YAML::Node n = node(key);
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("'" + name_ + "." + key + "' has the wrong type", line_of(n));
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) throw ConfigError("unknown key '" + key + "' in '" + name_ + "'", line_of(kv.first));
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> seen_;
};

// Runs a validation and re-throws its std::invalid_argument as a ConfigError at `line`.
template <class Fn>
void checked(int line, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line);
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what(), line);
  }
}

LatticeSpec parse_lattice(Block b) {
  const auto kind = b.get<std::string>("kind");
  LatticeSpec spec;
  checked(b.line(), [&] {
    spec.kind = lattice_kind_from_string(kind);
  });
  if (spec.kind == LatticeKind::Custom) {
    const int n = b.get<int>("sites");
    const YAML::Node bonds = b.node("bonds");
    if (!bonds.IsSequence()) throw ConfigError("'lattice.bonds' must be a list of [i, j, J]", line_of(bonds));
    CouplingMatrix cm(0);
    checked(b.line(), [&] { cm = CouplingMatrix(n); });
    for (const auto& bond : bonds) {
      if (!bond.IsSequence() || bond.size() != 3) throw ConfigError("a bond is written [i, j, J]", line_of(bond));
      try {
        const int i = bond[0].as<int>();
        const int j = bond[1].as<int>();
        const double J = bond[2].as<double>();
        checked(line_of(bond), [&] { cm.add(i, j, J); });
      } catch (const YAML::Exception&) {
        throw ConfigError("a bond is written [i, j, J] with integer sites", line_of(bond));
      }
    }
    const auto stagger = b.get<std::vector<int>>("stagger", {});
    checked(b.line(), [&] { spec = LatticeSpec::custom(std::move(cm), stagger); });
  } else {
    spec.length = b.get<int>("length");
    spec.J = b.get<double>("J", 1.0);
    spec.Jp = b.get<double>("Jp", spec.J);
  }
  b.finish();
  checked(b.line(), [&] { spec.validate(); });
  return spec;
}

Schedule parse_schedule(Block b) {
  Schedule s;
  s.total_time = b.get<double>("total_time", s.total_time);
  s.omega = b.get<double>("omega", s.omega);
  s.hp0 = b.get<double>("hp0", s.hp0);
  checked(b.line(), [&] { s.form = path_form_from_string(b.get<std::string>("form", "linear")); });
  s.betas = b.get<std::vector<double>>("betas", {});
  if (b.has("f_end")) {
    const double f_end = b.get<double>("f_end");
    if (std::abs(f_end - kSpiralEndTilt) > 1e-12) {
      throw ConfigError("f(T) is fixed at sqrt(2/3) = 0.816496580927726 by the path form; got " +
                            std::to_string(f_end),
                        b.line());
    }
  }
  if (b.has("hp_end") && b.get<double>("hp_end") != 0.0) {
    throw ConfigError("the penalty always ramps to h_P(T) = 0", b.line());
  }
  b.finish();
  checked(b.line(), [&] { s.validate(); });
  return s;
}

EvolutionOptions parse_evolution(Block b, EvolutionOptions e) {
  e.tol = b.get<double>("tol", e.tol);
  e.samples = b.get<int>("samples", e.samples);
  e.initial_substeps = b.get<int>("initial_substeps", e.initial_substeps);
  e.max_steps = b.get<std::int64_t>("max_steps", e.max_steps);
  const auto stepper = b.get<std::string>("stepper", e.stepper == Stepper::Midpoint ? "midpoint" : "cf4");
  if (stepper == "cf4") {
    e.stepper = Stepper::CommutatorFree4;
  } else if (stepper == "midpoint") {
    e.stepper = Stepper::Midpoint;
  } else {
    throw ConfigError("unknown stepper '" + stepper + "' (expected cf4 or midpoint)", b.line());
  }
  b.finish();
  if (!(e.tol > 0.0) || e.samples < 1 || e.initial_substeps < 1 || e.max_steps < 1) {
    throw ConfigError("evolution needs tol > 0 and positive sample and step counts", b.line());
  }
  return e;
}

std::vector<double> increasing_values(Block& b, const std::string& key) {
  const auto values = b.get<std::vector<double>>(key);
  if (values.empty()) throw ConfigError("'" + key + "' is empty", b.line());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0) || (k > 0 && !(values[k] > values[k - 1]))) {
      throw ConfigError("'" + key + "' must be positive and strictly increasing", b.line());
    }
  }
  return values;
}

ScheduleTable parse_table(const YAML::Node& node, const std::filesystem::path& base_dir) {
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name == "synthetic") return ScheduleTable::synthetic();
    const std::filesystem::path p = std::filesystem::path(name).is_absolute() ? std::filesystem::path(name) : base_dir / name;
    try {
      return ScheduleTable::load(p.string());
    } catch (const ConfigError& e) {
      throw ConfigError(p.string() + ": " + e.what(), line_of(node));
    }
  }
  if (!node.IsSequence()) throw ConfigError("'anneal.table' must be 'synthetic', a file name or [s, A, B] rows", line_of(node));
  std::vector<double> s, a, b;
  for (const auto& row : node) {
    if (!row.IsSequence() || row.size() != 3) throw ConfigError("a table row is written [s, A, B]", line_of(row));
    try {
      s.push_back(row[0].as<double>());
      a.push_back(row[1].as<double>());
      b.push_back(row[2].as<double>());
    } catch (const YAML::Exception&) {
      throw ConfigError("table entries must be numbers", line_of(row));
    }
  }
  ScheduleTable table;
  checked(line_of(node), [&] { table = ScheduleTable(std::move(s), std::move(a), std::move(b)); });
  return table;
}

AnnealBlock parse_anneal(Block b, const std::filesystem::path& base_dir) {
  AnnealBlock out;
  auto& s = out.schedule;
  s.table = parse_table(b.node("table"), base_dir);
  s.h = b.get<double>("h", s.h);
  s.J = b.get<double>("J", s.J);
  s.Jp = b.get<double>("Jp", s.J);
  s.max_slew = b.get<double>("max_slew", 0.0);
  if (b.has("waypoints")) {
    if (b.has("ramp") || b.has("hold")) throw ConfigError("give either waypoints or ramp/hold, not both", b.line());
    const YAML::Node w = b.node("waypoints");
    if (!w.IsSequence()) throw ConfigError("'anneal.waypoints' must be a list of [t, s]", line_of(w));
    for (const auto& p : w) {
      if (!p.IsSequence() || p.size() != 2) throw ConfigError("a waypoint is written [t, s]", line_of(p));
      try {
        s.waypoints.push_back({p[0].as<double>(), p[1].as<double>()});
      } catch (const YAML::Exception&) {
        throw ConfigError("waypoint entries must be numbers", line_of(p));
      }
    }
  } else {
    const double ramp = b.get<double>("ramp");
    const double hold = b.get<double>("hold", 0.0);
    checked(b.line(), [&] { s.waypoints = reverse_anneal_waypoints(find_s_star(s.table, s.h), ramp, hold); });
  }
  checked(b.line(), [&] { out.options.frame = anneal_frame_from_string(b.get<std::string>("frame", "flipped")); });
  out.options.coupling_noise = b.get<double>("coupling_noise", 0.0);
  if (!(out.options.coupling_noise >= 0.0)) throw ConfigError("coupling_noise must be non-negative", b.line());
  b.finish();
  checked(b.line(), [&] { s.validate(); });
  return out;
}

struct Requirements {
  std::set<std::string> required;
  std::set<std::string> optional;
};

Requirements requirements(Command c) {
  switch (c) {
    case Command::Spiral:
      return {{"lattice", "schedule"}, {"basis", "evolution"}};
    case Command::SweepOmega:
    case Command::SweepTime:
      return {{"lattice", "schedule", "sweep"}, {"basis", "evolution"}};
    case Command::OptimizeHp:
      return {{"lattice", "schedule"}, {"basis", "evolution", "optimize"}};
    case Command::OptimizePath:
      return {{"lattice", "schedule"}, {"basis", "evolution", "path"}};
    case Command::Trotter:
      return {{"lattice", "trotter"}, {}};
    case Command::Compare:
      return {{"lattice", "compare"}, {"schedule", "evolution"}};
    case Command::Anneal:
      return {{"lattice", "anneal"}, {"evolution"}};
    case Command::FloquetCheck:
      return {{"lattice", "floquet"}, {}};
    case Command::Eigensolve:
      return {{"lattice"}, {"eigensolve"}};
  }
  return {};
}

std::string stepper_name(Stepper s) { return s == Stepper::Midpoint ? "midpoint" : "cf4"; }

}  // namespace

std::string to_string(Command command) { return command_names().at(command); }

Command command_from_string(const std::string& name) {
  for (const auto& [c, n] : command_names()) {
    if (n == name) return c;
  }
  std::string all;
  for (const auto& [c, n] : command_names()) all += (all.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown command '" + name + "' (expected one of " + all + ")");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!root.IsMap()) throw ConfigError("the config must be a mapping");
  if (root["config"] && root["version"]) root = root["config"];

  Block top(root, "config");
  ExperimentConfig cfg;
  const YAML::Node cmd = top.node("command");
  try {
    cfg.command = command_from_string(cmd.as<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), line_of(cmd));
  }
  cfg.seed = top.get<std::uint64_t>("seed", 0);

  const Requirements req = requirements(cfg.command);
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key == "command" || key == "seed") continue;
    if (!req.required.contains(key) && !req.optional.contains(key)) {
      throw ConfigError("'" + key + "' is not used by command " + to_string(cfg.command), line_of(kv.first));
    }
  }
  for (const auto& key : req.required) {
    if (!top.has(key)) throw ConfigError("command " + to_string(cfg.command) + " needs a '" + key + "' block", top.line());
  }

  cfg.lattice = parse_lattice(Block(top.node("lattice"), "lattice"));
  if (top.has("schedule")) {
    cfg.schedule = parse_schedule(Block(top.node("schedule"), "schedule"));
  } else if (cfg.command == Command::Compare) {
    cfg.schedule.form = PathForm::SineAugmented;
    cfg.schedule.betas = {1.0 / std::numbers::pi};
    cfg.schedule.hp0 = 0.18;
  }
  if (top.has("basis")) {
    const YAML::Node n = top.node("basis");
    checked(line_of(n), [&] { cfg.basis = start_basis_from_string(n.as<std::string>()); });
  }
  if (cfg.command == Command::Anneal) cfg.evolution = AnnealOptions{}.evolution;
  if (top.has("evolution")) cfg.evolution = parse_evolution(Block(top.node("evolution"), "evolution"), cfg.evolution);

  if (top.has("sweep")) {
    Block b(top.node("sweep"), "sweep");
    cfg.sweep_values = increasing_values(b, "values");
    b.finish();
  }
  if (top.has("optimize")) {
    Block b(top.node("optimize"), "optimize");
    cfg.golden.lo = b.get<double>("lo", cfg.golden.lo);
    cfg.golden.hi = b.get<double>("hi", cfg.golden.hi);
    cfg.golden.xtol = b.get<double>("xtol", cfg.golden.xtol);
    cfg.golden.max_iterations = b.get<int>("max_iterations", cfg.golden.max_iterations);
    b.finish();
    if (!(cfg.golden.hi > cfg.golden.lo) || cfg.golden.lo < 0.0 || cfg.golden.hi > cfg.schedule.omega) {
      throw ConfigError("optimize bracket must satisfy 0 <= lo < hi <= omega", b.line());
    }
    if (!(cfg.golden.xtol > 0.0) || cfg.golden.max_iterations < 1) {
      throw ConfigError("optimize needs xtol > 0 and max_iterations >= 1", b.line());
    }
  }
  if (top.has("path")) {
    Block b(top.node("path"), "path");
    auto& p = cfg.path;
    p.count = b.get<int>("count", p.count);
    p.max_drive = b.get<double>("max_drive", p.max_drive);
    p.initial_step = b.get<double>("initial_step", p.initial_step);
    p.size_tol = b.get<double>("size_tol", p.size_tol);
    p.max_iterations = b.get<int>("max_iterations", p.max_iterations);
    p.restarts = b.get<int>("restarts", p.restarts);
    b.finish();
    if (p.count < 2 || p.restarts < 1 || !(p.initial_step > 0.0) || !(p.size_tol > 0.0) || p.max_iterations < 1) {
      throw ConfigError("path needs count >= 2, restarts >= 1 and positive step, tolerance and iteration cap",
                        b.line());
    }
    if (p.max_drive + 1e-12 < kSpiralEndTilt) {
      throw ConfigError("infeasible drive constraint: max_drive is below sqrt(2/3)", b.line());
    }
  }
  cfg.path.seed = cfg.seed;
  if (top.has("trotter")) {
    Block b(top.node("trotter"), "trotter");
    auto& t = cfg.trotter;
    t.omega = b.get<double>("omega", t.omega);
    t.plan.steps = b.get<int>("steps");
    t.plan.hp = b.get<double>("hp", 0.0);
    checked(b.line(), [&] { t.plan.order = trotter_order_from_string(b.get<std::string>("order", "first")); });
    t.ideal = b.get<bool>("ideal", false);
    const bool canonical = b.get<bool>("canonical", false);
    if (canonical) {
      if (b.has("total_time")) throw ConfigError("a canonical plan fixes total_time itself", b.line());
      checked(b.line(), [&] { t.plan = canonical_second_order_plan(t.plan.steps, t.omega, t.plan.hp); });
    } else {
      t.plan.total_time = b.get<double>("total_time");
    }
    b.finish();
    checked(b.line(), [&] {
      t.plan.validate();
      if (!(t.omega > 0.0)) throw std::invalid_argument("trotter.omega must be positive");
      if (t.ideal && t.plan.order != TrotterOrder::First) {
        throw std::invalid_argument("ideal pulses are only modelled for the first-order sequence");
      }
      if (t.plan.order == TrotterOrder::SecondMinimal) second_order_schedule(t.plan, t.omega);
    });
  }
  if (top.has("compare")) {
    Block b(top.node("compare"), "compare");
    auto& c = cfg.compare;
    c.omega = b.get<double>("omega", c.omega);
    c.times = increasing_values(b, "times");
    c.steps = b.get<std::vector<int>>("steps", c.steps);
    c.options.trotter_hp = b.get<double>("trotter_hp", c.options.trotter_hp);
    checked(b.line(), [&] { c.options.order = trotter_order_from_string(b.get<std::string>("order", "first")); });
    c.options.coherence_time = b.get<double>("coherence_time", c.options.coherence_time);
    c.options.drive_cap = b.get<double>("drive_cap", c.options.drive_cap);
    b.finish();
    if (c.steps.empty()) throw ConfigError("compare.steps is empty", b.line());
    for (int m : c.steps) {
      if (m < 1) throw ConfigError("compare.steps must be positive", b.line());
    }
    if (!(c.omega > 0.0)) throw ConfigError("compare.omega must be positive", b.line());
    c.options.spiral = cfg.schedule;
    c.options.evolution = cfg.evolution;
  }
  if (top.has("anneal")) {
    cfg.anneal = parse_anneal(Block(top.node("anneal"), "anneal"), base_dir);
    cfg.anneal.options.seed = cfg.seed;
    cfg.anneal.options.evolution = cfg.evolution;
  }
  if (top.has("floquet")) {
    Block b(top.node("floquet"), "floquet");
    cfg.floquet.theta = b.get<double>("theta", cfg.floquet.theta);
    cfg.floquet.omegas = increasing_values(b, "omegas");
    cfg.floquet.penalty = b.get<std::vector<double>>("penalty", {});
    b.finish();
    if (!cfg.floquet.penalty.empty() && static_cast<int>(cfg.floquet.penalty.size()) != cfg.lattice.nsites()) {
      throw ConfigError("floquet.penalty needs one field per site", b.line());
    }
  }
  if (top.has("eigensolve")) {
    Block b(top.node("eigensolve"), "eigensolve");
    cfg.eigen_count = b.get<int>("count", cfg.eigen_count);
    b.finish();
  }
  if (cfg.command == Command::Eigensolve &&
      (cfg.eigen_count < 1 || cfg.lattice.nsites() > kMaxEigenSites ||
       cfg.eigen_count > (1 << cfg.lattice.nsites()))) {
    throw ConfigError("eigensolve.count must lie in [1, 2^n] and the lattice within 12 sites");
  }
  top.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  using json = nlohmann::ordered_json;
  const Requirements req = requirements(command);
  auto uses = [&](const std::string& key) { return req.required.contains(key) || req.optional.contains(key); };

  json j;
  j["command"] = to_string(command);
  j["seed"] = seed;

  json lat;
  lat["kind"] = adspiral::to_string(lattice.kind);
  if (lattice.kind == LatticeKind::Custom) {
    const auto cm = lattice.couplings();
    lat["sites"] = lattice.nsites();
    json bonds = json::array();
    for (const auto& b : cm.bonds()) bonds.push_back(json::array({b.i, b.j, b.strength}));
    lat["bonds"] = bonds;
    if (!lattice.custom_stagger.empty()) lat["stagger"] = lattice.custom_stagger;
  } else {
    lat["length"] = lattice.length;
    lat["J"] = lattice.J;
    lat["Jp"] = lattice.Jp;
  }
  j["lattice"] = lat;

  if (uses("schedule")) {
    j["schedule"] = {{"total_time", schedule.total_time}, {"omega", schedule.omega}, {"hp0", schedule.hp0},
                     {"form", adspiral::to_string(schedule.form)}, {"betas", schedule.betas}};
  }
  if (uses("basis")) j["basis"] = adspiral::to_string(basis);
  if (uses("evolution")) {
    j["evolution"] = {{"tol", evolution.tol},
                      {"samples", evolution.samples},
                      {"initial_substeps", evolution.initial_substeps},
                      {"max_steps", evolution.max_steps},
                      {"stepper", stepper_name(evolution.stepper)}};
  }
  switch (command) {
    case Command::SweepOmega:
    case Command::SweepTime:
      j["sweep"] = {{"values", sweep_values}};
      break;
    case Command::OptimizeHp:
      j["optimize"] = {{"lo", golden.lo}, {"hi", golden.hi}, {"xtol", golden.xtol},
                       {"max_iterations", golden.max_iterations}};
      break;
    case Command::OptimizePath:
      j["path"] = {{"count", path.count},           {"max_drive", path.max_drive},
                   {"initial_step", path.initial_step}, {"size_tol", path.size_tol},
                   {"max_iterations", path.max_iterations}, {"restarts", path.restarts}};
      break;
    case Command::Trotter:
      j["trotter"] = {{"steps", trotter.plan.steps},
                      {"total_time", trotter.plan.total_time},
                      {"hp", trotter.plan.hp},
                      {"order", adspiral::to_string(trotter.plan.order)},
                      {"omega", trotter.omega},
                      {"ideal", trotter.ideal}};
      break;
    case Command::Compare:
      j["compare"] = {{"omega", compare.omega},
                      {"times", compare.times},
                      {"steps", compare.steps},
                      {"trotter_hp", compare.options.trotter_hp},
                      {"order", adspiral::to_string(compare.options.order)},
                      {"coherence_time", compare.options.coherence_time},
                      {"drive_cap", compare.options.drive_cap}};
      break;
    case Command::Anneal: {
      const auto& s = anneal.schedule;
      json rows = json::array();
      for (std::size_t k = 0; k < s.table.s().size(); ++k) {
        rows.push_back(json::array({s.table.s()[k], s.table.a()[k], s.table.b()[k]}));
      }
      json way = json::array();
      for (const auto& w : s.waypoints) way.push_back(json::array({w.time, w.s}));
      j["anneal"] = {{"table", rows},
                     {"h", s.h},
                     {"J", s.J},
                     {"Jp", s.Jp},
                     {"max_slew", s.max_slew},
                     {"waypoints", way},
                     {"frame", adspiral::to_string(anneal.options.frame)},
                     {"coupling_noise", anneal.options.coupling_noise}};
      break;
    }
    case Command::FloquetCheck:
      j["floquet"] = {{"theta", floquet.theta}, {"omegas", floquet.omegas}, {"penalty", floquet.penalty}};
      break;
    case Command::Eigensolve:
      j["eigensolve"] = {{"count", eigen_count}};
      break;
    case Command::Spiral:
      break;
  }
  return j;
}

}  // namespace adspiral
