#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "zenosim/cli/config.hpp"
#include "zenosim/cli/runner.hpp"
#include "zenosim/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSimulationError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace zenosim::cli;

  CLI::App app{"zenosim: continuous-measurement decay simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned jobs = 1;
  bool seedless = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "scenario config file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (overrides [output] path)");
    cmd->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
    cmd->add_flag("--seedless", seedless, "assert the run consults no random number generator");
  };
  auto* run = app.add_subcommand("run", "run one scenario and write its data files");
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write a report");
  auto* validate = app.add_subcommand("validate", "parse and check a config without running it");
  auto* list = app.add_subcommand("list-scenarios", "list the scenario types");
  add_common(run, true);
  add_common(sweep, true);
  add_common(validate, true);
  add_common(list, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (list->parsed()) {
    for (const auto& info : scenario_catalog()) {
      std::printf("%-11s %s\n            requires %s\n", std::string(to_string(info.type)).c_str(),
                  std::string(info.summary).c_str(), std::string(info.required).c_str());
    }
    return 0;
  }

  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const zenosim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  // Every scenario is deterministic; there is no generator that --seedless
  // would have to disable.
  (void)seedless;

  if (validate->parsed()) {
    std::printf("ok: %s%s\n", std::string(to_string(config.type)).c_str(), config.sweep ? " (sweep)" : "");
    return 0;
  }

  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(config.output.path) : std::filesystem::path(out_dir);
  try {
    if (run->parsed()) {
      for (const auto& file : run_scenario(config, dir).files) std::printf("%s\n", file.string().c_str());
    } else {
      const SweepResult result = run_sweep(config, dir, jobs);
      std::size_t failed = 0;
      for (const auto& row : result.rows) failed += row.ok ? 0 : 1;
      std::printf("%s\n", result.report.string().c_str());
      if (failed) std::fprintf(stderr, "%zu of %zu sweep points failed\n", failed, result.rows.size());
    }
  } catch (const zenosim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulation error: %s\n", e.what());
    return kSimulationError;
  }
  return 0;
}
