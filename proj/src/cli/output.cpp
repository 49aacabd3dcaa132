#include "zenosim/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zenosim/errors.hpp"

namespace zenosim::cli {

namespace {

nlohmann::ordered_json params_json(const ScenarioConfig& c) {
  const ModelParams& p = c.params;
  nlohmann::ordered_json j;
  j["omega_pc"] = p.omega_pc;
  j["delta_omega"] = p.delta_omega;
  j["rho_l"] = p.rho_l;
  j["rho_r"] = p.rho_r;
  j["bias"] = p.bias;
  j["e0"] = p.e0;
  j["e1"] = p.e1;
  j["gamma0"] = p.gamma0;
  j["gamma1"] = p.gamma1;
  j["omega_alpha"] = p.omega_alpha;
  j["gamma_d"] = c.effective_gamma_d();
  return j;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

std::string render_csv(const Table& table, const ScenarioConfig& config) {
  std::ostringstream out;
  for (const auto& note : table.notes) out << "# " << note << "\n";
  out << kProvenanceMarker << "\n";
  std::istringstream cfg(serialize_config(config));
  for (std::string line; std::getline(cfg, line);) out << (line.empty() ? "#" : "# " + line) << "\n";
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (const double* v = std::get_if<double>(&row[k])) {
        out << format_number(*v);
      } else if (const long long* n = std::get_if<long long>(&row[k])) {
        out << *n;
      } else {
        out << std::get<std::string>(row[k]);
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string render_json(const Table& table, const ScenarioConfig& config) {
  nlohmann::ordered_json j;
  j["provenance"]["scenario"] = std::string(to_string(config.type));
  j["provenance"]["config"] = serialize_config(config);
  j["provenance"]["params"] = params_json(config);
  j["provenance"]["notes"] = table.notes;
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const double* v = std::get_if<double>(&cell)) {
        if (std::isfinite(*v)) {
          r.push_back(*v);
        } else {
          r.push_back(nullptr);
        }
      } else if (const long long* n = std::get_if<long long>(&cell)) {
        r.push_back(*n);
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::filesystem::path write_table(const Table& table, const ScenarioConfig& config,
                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const bool json = config.output.format == OutputFormat::Json;
  const auto path = dir / (table.name + (json ? ".json" : ".csv"));
  write_file(path, json ? render_json(table, config) : render_csv(table, config));
  return path;
}

}  // namespace zenosim::cli
