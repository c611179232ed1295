#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orient/errors.hpp"
#include "orient/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

// --threads (or the OpenMP default) capped by OB_THREADS.
int thread_count(std::optional<int> requested) {
  int n = requested.value_or(omp_get_max_threads());
  if (const char* env = std::getenv("OB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw orient::ConfigError("OB_THREADS must be a positive integer");
    n = std::min<long>(n, cap);
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian and MAP rotation estimation experiments"};
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  app.add_option("experiment", experiment,
                 "snr_sweep | prior_mismatch | grid_sweep | recover2d | recover3d | einstein_noise")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "output directory (overrides the config's output)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    omp_set_num_threads(thread_count(threads));

    nlohmann::json overrides = {{"experiment", experiment}};
    if (seed) overrides["seed"] = *seed;
    if (out_dir) overrides["output"] = *out_dir;
    const orient::ExperimentConfig cfg = orient::load_config(config_path, overrides);

    const orient::ExperimentOutput out = orient::run_experiment(cfg);
    orient::write_outputs(cfg, out, cfg.output);
    std::cout << orient::to_string(cfg.experiment) << ": " << out.records.size() << " records, "
              << out.volumes.size() << " volumes, " << out.traces.size() << " traces written to " << cfg.output
              << "\n";
    return 0;
  } catch (const orient::FileError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const orient::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
