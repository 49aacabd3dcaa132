#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zenosim/cli/config.hpp"

namespace zenosim::cli {

/// Rate summary of one run, used for sweep report rows.
struct RunMetrics {
  std::optional<double> fitted_rate;
  std::optional<double> predicted_rate;
  std::optional<double> rate_ratio;
  std::string classification;    // empty when not applicable
  std::optional<double> t_star;  // cavity only; may be infinite
  std::string message;           // non-fatal problem (e.g. a failed fit)
};

struct RunResult {
  std::vector<std::filesystem::path> files;
  RunMetrics metrics;
};

/// Runs one scenario and writes its data files into `dir`. The config must
/// not carry a sweep block. Simulation errors propagate.
RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& dir);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  RunMetrics metrics;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending sweep value
  std::filesystem::path report;
};

/// Runs every sweep value (up to `jobs` at a time) into dir/point_<k>, k
/// counting in ascending value order, and writes dir/sweep_report. A failing
/// point is recorded in its row; the others still run.
SweepResult run_sweep(const ScenarioConfig& config, const std::filesystem::path& dir, unsigned jobs = 1);

}  // namespace zenosim::cli
