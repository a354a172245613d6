#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "adspiral/annealer.hpp"
#include "adspiral/optimize.hpp"
#include "adspiral/pulse.hpp"
#include "adspiral/spiral.hpp"

namespace adspiral {

enum class Command {
  Spiral,
  SweepOmega,
  SweepTime,
  OptimizeHp,
  OptimizePath,
  Trotter,
  Compare,
  Anneal,
  FloquetCheck,
  Eigensolve,
};

std::string to_string(Command command);
Command command_from_string(const std::string& name);

struct TrotterBlock {
  TrotterPlan plan;
  double omega = 8.0;
  bool ideal = false;
};

struct CompareBlock {
  double omega = 8.0;
  std::vector<double> times;
  std::vector<int> steps{4, 8, 16};
  CompareOptions options;
};

struct AnnealBlock {
  AnnealSchedule schedule;
  AnnealOptions options;
};

struct FloquetBlock {
  double theta = kSpiralTheta;
  std::vector<double> omegas;
  std::vector<double> penalty;
};

/// One experiment. Blocks not used by the command keep their defaults.
struct ExperimentConfig {
  Command command = Command::Spiral;
  std::uint64_t seed = 0;
  LatticeSpec lattice;
  Schedule schedule;
  StartBasis basis = StartBasis::Neel;
  EvolutionOptions evolution;
  std::vector<double> sweep_values;
  GoldenOptions golden;
  PathOptions path;
  TrotterBlock trotter;
  CompareBlock compare;
  AnnealBlock anneal;
  FloquetBlock floquet;
  int eigen_count = 4;

  /// The resolved configuration. Parsing it back gives the same experiment.
  nlohmann::ordered_json to_json() const;
};

/// Parses YAML (JSON is accepted too). Relative file names inside the config
/// resolve against base_dir. Every problem is reported as a ConfigError with
/// the offending line where one exists. A document with top-level "config"
/// and "version" keys is read as a run manifest and its "config" is used.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace adspiral
