#include "zenosim/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "zenosim/errors.hpp"

namespace zenosim::cli {

std::string_view to_string(ScenarioType type) {
  switch (type) {
    case ScenarioType::Detector:
      return "detector";
    case ScenarioType::FlatDecay:
      return "flat-decay";
    case ScenarioType::Cavity:
      return "cavity";
    case ScenarioType::Bayes:
      return "bayes";
    case ScenarioType::Projection:
      return "projection";
  }
  return "flat-decay";
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog = {
      {ScenarioType::Detector, "counting statistics P_n(t) of the bare point contact",
       "params: omega_pc, rho_l, rho_r, bias; integration: t_end"},
      {ScenarioType::FlatDecay, "dot decaying into a flat continuum under measurement (survival, current, line shape)",
       "params: gamma0 > 0; integration: t_end"},
      {ScenarioType::Cavity, "dot decaying through a detuned cavity, measured vs unmeasured (Zeno / anti-Zeno)",
       "params: omega_alpha, gamma1 > 0, e0, e1; integration: t_end"},
      {ScenarioType::Bayes, "count distribution conditioned on a readout N1 at t1",
       "scenario: t1, n1; params: omega_pc, rho_l, rho_r, bias; integration: t_end > t1"},
      {ScenarioType::Projection, "survival under repeated projective measurement every dt",
       "scenario: a, dt; integration: t_end"},
  };
  return catalog;
}

IntegrationControl IntegrationConfig::control() const {
  IntegrationControl ctl = method == Method::Rk4 ? IntegrationControl::fixed(step)
                                                 : IntegrationControl::adaptive(tolerance.value_or(default_tolerance()));
  if (method == Method::Dopri5) ctl.step = step;
  ctl.max_steps = max_steps;
  return ctl;
}

double ScenarioConfig::effective_gamma_d() const {
  if (gamma_d) return *gamma_d;
  return derived_rates(params).gamma_d;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const char* const kSections[] = {"scenario", "params", "grid", "integration", "sweep", "output"};

bool known_section(std::string_view name) {
  for (const char* s : kSections) {
    if (name == s) return true;
  }
  return false;
}

struct Document {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;

  int line_of(const std::string& field) const {
    const auto dot = field.find('.');
    const auto sec = sections.find(field.substr(0, dot));
    if (sec == sections.end()) return 0;
    if (dot == std::string::npos) return section_lines.at(sec->first);
    const auto it = sec->second.find(field.substr(dot + 1));
    return it == sec->second.end() ? section_lines.at(sec->first) : it->second.line;
  }
};

Document tokenize(std::string_view text) {
  Document doc;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto comment = raw.find_first_of("#;");
    const std::string_view line = trim(raw.substr(0, comment));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(current)) throw ConfigError("unknown section [" + current + "]", line_no, current);
      if (doc.sections.count(current)) throw ConfigError("duplicate section [" + current + "]", line_no, current);
      doc.sections[current];
      doc.section_lines[current] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (current.empty()) throw ConfigError("key outside of any section", line_no, key);
    const std::string field = current + "." + key;
    if (key.empty()) throw ConfigError("empty key", line_no, field);
    auto& section = doc.sections[current];
    if (section.count(key)) throw ConfigError("duplicate key", line_no, field);
    section[key] = Entry{value, line_no};
  }
  return doc;
}

class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  const Entry* find(const std::string& section, const std::string& key) {
    const auto sec = doc_.sections.find(section);
    if (sec == doc_.sections.end()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    used_[section + "." + key] = true;
    return &it->second;
  }

  std::optional<double> number(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return parse_number(e->value, *e, section + "." + key);
  }

  std::optional<std::size_t> count(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    std::size_t out = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError("expected a nonnegative integer, got '" + e->value + "'", e->line, section + "." + key);
    }
    return out;
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    std::vector<double> out;
    if (!e) return out;
    std::string_view rest = e->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string item(trim(rest.substr(0, comma)));
      out.push_back(parse_number(item, *e, section + "." + key));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [name, section] : doc_.sections) {
      for (const auto& [key, entry] : section) {
        const std::string field = name + "." + key;
        if (!used_.count(field)) throw ConfigError("unknown key", entry.line, field);
      }
    }
  }

 private:
  static double parse_number(const std::string& s, const Entry& e, const std::string& field) {
    double out = 0.0;
    const char* first = s.data();
    const char* last = first + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || s.empty()) {
      throw ConfigError("expected a number, got '" + s + "'", e.line, field);
    }
    if (!std::isfinite(out)) throw ConfigError("value must be finite", e.line, field);
    return out;
  }

  const Document& doc_;
  std::map<std::string, bool> used_;
};

struct ParamField {
  const char* name;
  double ModelParams::*member;
};

const ParamField kParamFields[] = {
    {"omega_pc", &ModelParams::omega_pc}, {"delta_omega", &ModelParams::delta_omega},
    {"rho_l", &ModelParams::rho_l},       {"rho_r", &ModelParams::rho_r},
    {"bias", &ModelParams::bias},         {"e0", &ModelParams::e0},
    {"e1", &ModelParams::e1},             {"gamma0", &ModelParams::gamma0},
    {"gamma1", &ModelParams::gamma1},     {"omega_alpha", &ModelParams::omega_alpha},
};

ScenarioType parse_type(const std::string& s, int line) {
  for (const auto& info : scenario_catalog()) {
    if (s == to_string(info.type)) return info.type;
  }
  throw ConfigError("unknown scenario type '" + s + "'", line, "scenario.type");
}

struct Checker {
  const Document* doc = nullptr;

  [[noreturn]] void fail(const std::string& message, const std::string& field) const {
    throw ConfigError(message, doc ? doc->line_of(field) : 0, field);
  }
  void require(bool ok, const std::string& message, const std::string& field) const {
    if (!ok) fail(message, field);
  }
};

void check_config(const ScenarioConfig& c, const Checker& chk) {
  const ModelParams& p = c.params;
  for (const auto& f : kParamFields) {
    const double v = p.*f.member;
    const std::string field = std::string("params.") + f.name;
    chk.require(std::isfinite(v), "must be finite", field);
    const bool energy = std::string_view(f.name) == "e0" || std::string_view(f.name) == "e1";
    if (!energy) chk.require(v >= 0.0, "must be nonnegative", field);
  }
  chk.require(p.bias > 0.0, "bias must be positive", "params.bias");
  chk.require(p.delta_omega <= p.omega_pc, "delta_omega must not exceed omega_pc", "params.delta_omega");
  if (c.gamma_d) chk.require(*c.gamma_d >= 0.0, "must be nonnegative", "params.gamma_d");

  const auto& in = c.integration;
  chk.require(in.t_end > 0.0, "t_end must be positive", "integration.t_end");
  chk.require(in.n_outputs >= 2, "n_outputs must be at least 2", "integration.n_outputs");
  chk.require(in.step > 0.0, "step must be positive", "integration.step");
  chk.require(in.max_steps > 0, "max_steps must be positive", "integration.max_steps");
  if (in.tolerance) chk.require(*in.tolerance > 0.0, "tolerance must be positive", "integration.tolerance");

  if (c.grid.n_levels && c.type == ScenarioType::FlatDecay) {
    chk.require(*c.grid.n_levels >= 2, "n_levels must be at least 2", "grid.n_levels");
  }
  if (c.grid.half_bandwidth) chk.require(*c.grid.half_bandwidth > 0.0, "must be positive", "grid.half_bandwidth");

  switch (c.type) {
    case ScenarioType::FlatDecay:
      chk.require(p.gamma0 > 0.0, "flat-decay needs gamma0 > 0", "params.gamma0");
      break;
    case ScenarioType::Cavity:
      chk.require(p.gamma1 > 0.0, "cavity needs gamma1 > 0", "params.gamma1");
      break;
    case ScenarioType::Bayes:
      chk.require(c.t1 >= 0.0, "t1 must be nonnegative", "scenario.t1");
      chk.require(in.t_end > c.t1, "t_end must exceed t1", "integration.t_end");
      break;
    case ScenarioType::Projection:
      chk.require(c.a >= 0.0, "a must be nonnegative", "scenario.a");
      chk.require(c.dt > 0.0, "dt must be positive", "scenario.dt");
      chk.require(c.a * c.dt * c.dt < 1.0, "a dt^2 must be below 1", "scenario.dt");
      break;
    case ScenarioType::Detector:
      break;
  }

  if (c.sweep) {
    chk.require(c.type == ScenarioType::FlatDecay || c.type == ScenarioType::Cavity,
                "sweeps are supported for flat-decay and cavity scenarios", "sweep");
    chk.require(is_sweep_parameter(c.sweep->parameter), "unknown sweep parameter '" + c.sweep->parameter + "'",
                "sweep.parameter");
    chk.require(!c.sweep->values.empty(), "sweep needs at least one value", "sweep.values");
    for (double v : c.sweep->values) {
      ScenarioConfig point = c;
      point.sweep.reset();
      set_sweep_parameter(point, c.sweep->parameter, v);
      try {
        check_config(point, Checker{});
      } catch (const ConfigError& e) {
        chk.fail(std::string("sweep value invalid: ") + e.what(), "sweep.values");
      }
    }
  }

  try {
    validate_params(p);
  } catch (const InvalidParams& e) {
    chk.fail(e.what(), "params");
  }
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool is_sweep_parameter(std::string_view name) {
  if (name == "gamma_d") return true;
  for (const auto& f : kParamFields) {
    if (name == f.name) return true;
  }
  return false;
}

void set_sweep_parameter(ScenarioConfig& config, std::string_view name, double value) {
  if (name == "gamma_d") {
    config.gamma_d = value;
    return;
  }
  for (const auto& f : kParamFields) {
    if (name == f.name) {
      config.params.*f.member = value;
      return;
    }
  }
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "'", 0, "sweep.parameter");
}

ScenarioConfig parse_config(std::string_view text) {
  const Document doc = tokenize(text);
  Reader r(doc);
  ScenarioConfig c;

  const Entry* type = r.find("scenario", "type");
  if (!type) throw ConfigError("missing scenario type", doc.line_of("scenario"), "scenario.type");
  c.type = parse_type(type->value, type->line);
  if (!doc.sections.count("params")) throw ConfigError("missing [params] section", 0, "params");
  if (!doc.sections.count("integration")) throw ConfigError("missing [integration] section", 0, "integration");

  if (c.type == ScenarioType::Bayes) {
    const auto t1 = r.number("scenario", "t1");
    const auto n1 = r.count("scenario", "n1");
    if (!t1) throw ConfigError("bayes needs t1", doc.line_of("scenario"), "scenario.t1");
    if (!n1) throw ConfigError("bayes needs n1", doc.line_of("scenario"), "scenario.n1");
    c.t1 = *t1;
    c.n1 = *n1;
  }
  if (c.type == ScenarioType::Detector || c.type == ScenarioType::Bayes) c.n_max = r.count("scenario", "n_max");
  if (c.type == ScenarioType::Projection) {
    const auto a = r.number("scenario", "a");
    const auto dt = r.number("scenario", "dt");
    if (!a) throw ConfigError("projection needs a", doc.line_of("scenario"), "scenario.a");
    if (!dt) throw ConfigError("projection needs dt", doc.line_of("scenario"), "scenario.dt");
    c.a = *a;
    c.dt = *dt;
  }

  for (const auto& f : kParamFields) {
    if (auto v = r.number("params", f.name)) c.params.*f.member = *v;
  }
  c.gamma_d = r.number("params", "gamma_d");

  c.grid.n_levels = r.count("grid", "n_levels");
  c.grid.half_bandwidth = r.number("grid", "half_bandwidth");

  if (auto m = r.text("integration", "method")) {
    if (*m == "dopri5") {
      c.integration.method = Method::Dopri5;
    } else if (*m == "rk4") {
      c.integration.method = Method::Rk4;
    } else {
      throw ConfigError("method must be dopri5 or rk4", doc.line_of("integration.method"), "integration.method");
    }
  }
  c.integration.tolerance = r.number("integration", "tolerance");
  if (auto v = r.number("integration", "step")) c.integration.step = *v;
  if (auto v = r.count("integration", "max_steps")) c.integration.max_steps = *v;
  const auto t_end = r.number("integration", "t_end");
  if (!t_end) throw ConfigError("missing t_end", doc.line_of("integration"), "integration.t_end");
  c.integration.t_end = *t_end;
  if (auto v = r.count("integration", "n_outputs")) c.integration.n_outputs = *v;

  if (doc.sections.count("sweep")) {
    SweepConfig s;
    const auto name = r.text("sweep", "parameter");
    if (!name) throw ConfigError("missing sweep parameter", doc.line_of("sweep"), "sweep.parameter");
    s.parameter = *name;
    s.values = r.numbers("sweep", "values");
    c.sweep = std::move(s);
  }

  if (auto f = r.text("output", "format")) {
    if (*f == "csv") {
      c.output.format = OutputFormat::Csv;
    } else if (*f == "json") {
      c.output.format = OutputFormat::Json;
    } else {
      throw ConfigError("format must be csv or json", doc.line_of("output.format"), "output.format");
    }
  }
  if (auto p = r.text("output", "path")) c.output.path = *p;

  r.reject_unused();
  check_config(c, Checker{&doc});
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate_config(const ScenarioConfig& config) { check_config(config, Checker{}); }

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "type = " << to_string(c.type) << "\n";
  if (c.type == ScenarioType::Bayes) {
    out << "t1 = " << number_text(c.t1) << "\n";
    out << "n1 = " << c.n1 << "\n";
  }
  if (c.n_max && (c.type == ScenarioType::Detector || c.type == ScenarioType::Bayes)) {
    out << "n_max = " << *c.n_max << "\n";
  }
  if (c.type == ScenarioType::Projection) {
    out << "a = " << number_text(c.a) << "\n";
    out << "dt = " << number_text(c.dt) << "\n";
  }

  out << "\n[params]\n";
  for (const auto& f : kParamFields) out << f.name << " = " << number_text(c.params.*f.member) << "\n";
  if (c.gamma_d) out << "gamma_d = " << number_text(*c.gamma_d) << "\n";

  if (c.grid.n_levels || c.grid.half_bandwidth) {
    out << "\n[grid]\n";
    if (c.grid.n_levels) out << "n_levels = " << *c.grid.n_levels << "\n";
    if (c.grid.half_bandwidth) out << "half_bandwidth = " << number_text(*c.grid.half_bandwidth) << "\n";
  }

  const auto& in = c.integration;
  out << "\n[integration]\n";
  out << "method = " << (in.method == Method::Rk4 ? "rk4" : "dopri5") << "\n";
  if (in.tolerance) out << "tolerance = " << number_text(*in.tolerance) << "\n";
  out << "step = " << number_text(in.step) << "\n";
  out << "max_steps = " << in.max_steps << "\n";
  out << "t_end = " << number_text(in.t_end) << "\n";
  out << "n_outputs = " << in.n_outputs << "\n";

  if (c.sweep) {
    out << "\n[sweep]\n";
    out << "parameter = " << c.sweep->parameter << "\n";
    out << "values = ";
    for (std::size_t k = 0; k < c.sweep->values.size(); ++k) {
      out << (k ? ", " : "") << number_text(c.sweep->values[k]);
    }
    out << "\n";
  }

  out << "\n[output]\n";
  out << "format = " << to_string(c.output.format) << "\n";
  return out.str();
}

ScenarioConfig config_from_provenance(std::string_view text) {
  std::string body;
  bool inside = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    if (!inside) {
      inside = line == kProvenanceMarker;
      continue;
    }
    if (line.empty() || line.front() != '#') break;
    if (line.size() > 2) body.append(line.substr(2));
    body.push_back('\n');
  }
  if (!inside) throw ConfigError("no embedded config found");
  return parse_config(body);
}

bool equivalent(const ScenarioConfig& l, const ScenarioConfig& r) {
  const auto& a = l.integration;
  const auto& b = r.integration;
  return l.type == r.type && l.params == r.params && l.gamma_d == r.gamma_d &&
         l.grid.n_levels == r.grid.n_levels && l.grid.half_bandwidth == r.grid.half_bandwidth &&
         a.method == b.method && a.tolerance == b.tolerance && a.step == b.step && a.max_steps == b.max_steps &&
         a.t_end == b.t_end && a.n_outputs == b.n_outputs && l.sweep == r.sweep &&
         l.output.format == r.output.format && l.t1 == r.t1 && l.n1 == r.n1 && l.n_max == r.n_max &&
         l.a == r.a && l.dt == r.dt;
}

}  // namespace zenosim::cli
