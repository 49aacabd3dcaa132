#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zenosim/integrator.hpp"
#include "zenosim/params.hpp"

namespace zenosim::cli {

enum class ScenarioType { Detector, FlatDecay, Cavity, Bayes, Projection };
enum class OutputFormat { Csv, Json };

std::string_view to_string(ScenarioType type);
std::string_view to_string(OutputFormat format);

struct ScenarioInfo {
  ScenarioType type;
  std::string_view summary;
  std::string_view required;
};

const std::vector<ScenarioInfo>& scenario_catalog();

struct GridConfig {
  std::optional<std::size_t> n_levels;    // flat-decay: 2001, cavity: no reservoir levels
  std::optional<double> half_bandwidth;   // default: 20 widths
};

struct IntegrationConfig {
  Method method = Method::Dopri5;
  std::optional<double> tolerance;  // default: ZENOSIM_TOL or 1e-9
  double step = 1e-2;
  std::size_t max_steps = 50'000'000;
  double t_end = 0.0;
  std::size_t n_outputs = 201;

  IntegrationControl control() const;
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  OutputFormat format = OutputFormat::Csv;
  std::string path = ".";
};

struct ScenarioConfig {
  ScenarioType type = ScenarioType::FlatDecay;
  ModelParams params;
  std::optional<double> gamma_d;  // overrides the detector-derived rate
  GridConfig grid;
  IntegrationConfig integration;
  std::optional<SweepConfig> sweep;
  OutputConfig output;

  // scenario-specific keys of the [scenario] section
  double t1 = 0.0;                   // bayes
  std::size_t n1 = 0;                // bayes
  std::optional<std::size_t> n_max;  // detector, bayes
  double a = 1.0;                    // projection
  double dt = 0.1;                   // projection

  /// Dephasing rate used by the run: the override or the detector's (sqrt D - sqrt D')^2.
  double effective_gamma_d() const;
};

/// Parses the bracketed-section key = value format. '#' and ';' start
/// comments. Throws ConfigError carrying the offending line and field.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Scenario-level checks beyond syntax (required keys, parameter invariants).
void validate_config(const ScenarioConfig& config);

/// Canonical text form; parses back to an equivalent config. The output path
/// is left out so that relocated runs stay byte-identical.
std::string serialize_config(const ScenarioConfig& config);

/// Line that opens the embedded config in output files; the config follows
/// as "# "-prefixed lines.
inline constexpr std::string_view kProvenanceMarker = "# config:";

/// Reads the embedded config back out of an output file.
ScenarioConfig config_from_provenance(std::string_view text);

/// Same physics, ignoring the output path.
bool equivalent(const ScenarioConfig& lhs, const ScenarioConfig& rhs);

/// Names accepted by [sweep] parameter.
bool is_sweep_parameter(std::string_view name);
void set_sweep_parameter(ScenarioConfig& config, std::string_view name, double value);

}  // namespace zenosim::cli
