// Command-line front end: run experiments, compute reference optima and
// measure convergence slopes of trace files.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jfw/jfw.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kSolverError = 2;
constexpr int kDatasetError = 3;

int exit_code_for(const jfw::Error& e) {
  if (e.kind() == jfw::ErrorKind::ConfigError) return kConfigError;
  if (e.is_dataset_error()) return kDatasetError;
  return kSolverError;
}

jfw::ExperimentConfig load(const std::string& path, const std::optional<std::string>& output_dir,
                           const std::optional<std::uint64_t>& seed) {
  auto cfg = jfw::load_config(path);
  if (output_dir) cfg.output_dir = *output_dir;
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe and Jacobi-accelerated Frank-Wolfe experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run every configured method and write trace files");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--output-dir", output_dir, "Override output_dir");
  run->add_option("--seed", seed, "Override seed");
  run->add_flag("--timing", timing, "Record wall-clock times in trace files");

  auto* reference = app.add_subcommand("reference", "Estimate f* by a long certified FW run");
  reference->add_option("config", config_path, "Experiment config file")->required();
  reference->add_option("--seed", seed, "Override seed");

  std::string trace_path;
  int kmin = 0;
  int kmax = 0;
  auto* slope = app.add_subcommand("slope", "Log-log slope of suboptimality over a window");
  slope->add_option("trace", trace_path, "Trace CSV")->required();
  slope->add_option("--kmin", kmin, "First iteration of the window")->required();
  slope->add_option("--kmax", kmax, "Last iteration of the window")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      const auto cfg = load(config_path, output_dir, seed);
      for (const auto& s : jfw::run_experiment(cfg, {timing})) {
        for (const auto& w : s.warnings) std::cerr << "warning: " << jfw::to_string(s.method) << ": " << w << '\n';
        std::cout << jfw::format_summary(s) << '\n';
      }
    } else if (*reference) {
      auto cfg = load(config_path, std::nullopt, seed);
      if (cfg.reference.mode == jfw::ReferenceMode::None) cfg.reference.mode = jfw::ReferenceMode::LongRun;
      const auto est = jfw::compute_reference(cfg);
      std::cout.precision(17);
      std::cout << "reference=" << est->value << " certificate_gap=" << est->certificate_gap
                << " iterations=" << est->iterations << '\n';
    } else if (*slope) {
      const auto trace = jfw::read_trace(trace_path);
      std::cout.precision(17);
      std::cout << jfw::rate_slope(trace, kmin, kmax) << '\n';
    }
  } catch (const jfw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return 0;
}
