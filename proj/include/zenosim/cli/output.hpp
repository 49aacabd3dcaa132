#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "zenosim/cli/config.hpp"

namespace zenosim::cli {

using Cell = std::variant<double, long long, std::string>;

/// One data file: a named table plus free-form header notes ("D=... t=...").
struct Table {
  std::string name;  // file stem
  std::vector<std::string> notes;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline Cell index_cell(std::size_t n) { return static_cast<long long>(n); }

/// 12 significant digits in scientific notation; "inf", "-inf" or "nan" otherwise.
std::string format_number(double v);

/// CSV text: notes as "# " lines, the provenance marker and the config, then
/// the header row and data rows, LF line endings.
std::string render_csv(const Table& table, const ScenarioConfig& config);

/// JSON envelope {"provenance": {"config", "params", "notes"}, "columns", "rows"};
/// non-finite numbers become null.
std::string render_json(const Table& table, const ScenarioConfig& config);

/// Writes <dir>/<name>.csv or .json according to the config's format.
std::filesystem::path write_table(const Table& table, const ScenarioConfig& config,
                                  const std::filesystem::path& dir);

/// Writes text verbatim (binary mode, so LF stays LF).
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace zenosim::cli
