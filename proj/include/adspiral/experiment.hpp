#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "adspiral/config.hpp"

namespace adspiral {

struct RunContext {
  std::filesystem::path out_dir = ".";
  int workers = 1;
  /// Progress messages go here when set.
  std::ostream* log = nullptr;
};

struct RunReport {
  /// File names written, relative to out_dir; manifest.json is always last.
  std::vector<std::string> artifacts;
  /// Headline numbers, also written to result.json.
  nlohmann::ordered_json summary;
};

/// Runs one experiment and writes its CSV, result.json and manifest.json into
/// ctx.out_dir. Outputs depend only on the config, never on ctx.workers.
RunReport run_experiment(const ExperimentConfig& cfg, const RunContext& ctx);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace adspiral
