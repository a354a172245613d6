#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"

#include "adspiral/config.hpp"
#include "adspiral/errors.hpp"
#include "adspiral/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic spiral state preparation: exact simulations driven by one config file."};
  std::string config;
  std::string out = ".";
  int workers = 1;
  bool verbose = false;
  app.add_option("--config", config, "YAML experiment config or a previous manifest.json")->required();
  app.add_option("--out", out, "Directory for CSV/JSON outputs")->capture_default_str();
  app.add_option("--workers", workers, "Parallel workers for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--verbose", verbose, "Report progress on stderr");
  app.set_version_flag("--version", ADSPIRAL_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const adspiral::ExperimentConfig cfg = adspiral::load_config(config);
    adspiral::RunContext ctx{out, workers, verbose ? &std::cerr : nullptr};
    const adspiral::RunReport report = adspiral::run_experiment(cfg, ctx);
    std::cout << report.summary.dump(2) << '\n';
    return 0;
  } catch (const adspiral::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const adspiral::ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
