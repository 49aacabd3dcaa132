#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenosim/cli/config.hpp"
#include "zenosim/cli/output.hpp"
#include "zenosim/cli/runner.hpp"
#include "zenosim/errors.hpp"

using namespace zenosim;
using namespace zenosim::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "zenosim_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    FAIL("no column " << name);
    return 0;
  }
  std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r[c]));
    return out;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string cell; std::getline(s, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& path) {
  Csv csv;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

const char* kFlat = R"([scenario]
type = flat-decay

[params]
gamma0 = 1
omega_pc = 1
delta_omega = 0.5

[grid]
n_levels = 401

[integration]
t_end = 5
n_outputs = 51
)";

const char* kFig7 = R"([scenario]
type = cavity

[params]
omega_alpha = 1
gamma1 = 1
e1 = 10
gamma_d = 10

[integration]
t_end = 40
n_outputs = 801
)";

const char* kAlignedSweep = R"([scenario]
type = cavity

[params]
omega_alpha = 1
gamma1 = 10

[integration]
t_end = 20
n_outputs = 101

[sweep]
parameter = gamma_d
values = 10, 0, 5, 1
)";

int count_crossings(const Csv& csv) {
  const auto bare = csv.numbers("sigma00_unmeasured");
  const auto measured = csv.numbers("sigma00_measured");
  int crossings = 0;
  int sign = 0;
  for (std::size_t k = 1; k < bare.size(); ++k) {
    const double d = measured[k] - bare[k];
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s != 0 && sign != 0 && s != sign) ++crossings;
    if (s != 0) sign = s;
  }
  return crossings;
}

}  // namespace

TEST_CASE("shipped example configs validate") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(ZENOSIM_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++seen;
  }
  CHECK(seen >= 5);
}

TEST_CASE("config errors carry line and field") {
  auto error_of = [](const std::string& text) -> ConfigError {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e;
    }
    FAIL("no error for:\n" << text);
    return ConfigError("unreachable");
  };
  ConfigError e = error_of("[scenario]\ntype = detector\n[params]\nomega_pc = 1\nbogus = 2\n[integration]\nt_end = 1\n");
  CHECK(e.line() == 5);
  CHECK(e.field() == "params.bogus");

  e = error_of("[scenario]\ntype = detector\n[params]\nomega_pc = one\n[integration]\nt_end = 1\n");
  CHECK(e.line() == 4);
  CHECK(e.field() == "params.omega_pc");

  e = error_of("[scenario]\ntype = nothing\n[params]\n[integration]\nt_end = 1\n");
  CHECK(e.field() == "scenario.type");
  CHECK(e.line() == 2);

  e = error_of("[scenario]\ntype = detector\n[params]\n[integration]\nn_outputs = 3\n");
  CHECK(e.field() == "integration.t_end");

  e = error_of("[scenario]\ntype = detector\n[params]\nomega_pc = 1\ndelta_omega = 2\n[integration]\nt_end = 1\n");
  CHECK(e.field() == "params.delta_omega");
  CHECK(e.line() == 5);

  e = error_of("[scenario]\ntype = detector\n[params]\nomega_pc = 1\nomega_pc = 2\n[integration]\nt_end = 1\n");
  CHECK(e.line() == 5);

  e = error_of("[scenario]\ntype = cavity\n[params]\ngamma1 = 1\n[integration]\nt_end = 1\n[sweep]\nparameter = "
               "gamma9\nvalues = 1\n");
  CHECK(e.field() == "sweep.parameter");
  CHECK(e.line() == 8);

  e = error_of("[scenario]\ntype = detector\n[params]\n[integration]\nt_end = 1\n[sweep]\nparameter = omega_pc\n"
               "values = 1, 2\n");
  CHECK(e.field() == "sweep");

  e = error_of("[scenario]\ntype = bayes\nt1 = 2\n[params]\n[integration]\nt_end = 1\n");
  CHECK(e.field() == "scenario.n1");

  e = error_of("[scenario]\ntype = flat-decay\n[params]\n[integration]\nt_end = 1\n");
  CHECK(e.field() == "params.gamma0");

  CHECK_THROWS_AS(parse_config("[scenario]\ntype = detector\n[integration]\nt_end = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("type = detector\n"), ConfigError);
}

TEST_CASE("config round trip") {
  for (const char* text : {kFlat, kFig7, kAlignedSweep}) {
    const ScenarioConfig c = parse_config(text);
    const ScenarioConfig back = parse_config(serialize_config(c));
    CHECK(equivalent(c, back));
    CHECK(serialize_config(back) == serialize_config(c));
  }
  ScenarioConfig c = parse_config(kFlat);
  c.params.e0 = 0.1 + 0.2;  // not exactly representable in short decimal form
  c.integration.tolerance = 1e-10;
  CHECK(equivalent(parse_config(serialize_config(c)), c));
}

TEST_CASE("flat-decay run: provenance, survival column, determinism") {
  const ScenarioConfig c = parse_config(kFlat);
  const fs::path a = scratch("flat_a");
  const fs::path b = scratch("flat_b");
  const RunResult ra = run_scenario(c, a);
  const RunResult rb = run_scenario(c, b);
  REQUIRE(ra.files.size() == 3);
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    CHECK(ra.files[i].filename() == rb.files[i].filename());
    CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
  }

  const fs::path trajectory = a / "flat_decay_trajectory.csv";
  const std::string text = slurp(trajectory);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(equivalent(config_from_provenance(text), c));

  const Csv csv = read_csv(trajectory);
  const auto t = csv.numbers("t");
  const auto s = csv.numbers("sigma00");
  CHECK(t.back() == 5.0);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(s[k] - std::exp(-t[k])) <= 0.01 * std::exp(-t[k]));
  CHECK(csv.rows[1][1] == "9.04837418036e-01");  // 12 significant digits

  const Csv current = read_csv(a / "flat_decay_current.csv");
  const auto step = current.numbers("normalized_step");
  const auto x = current.numbers("gamma0_t");
  for (std::size_t k = 0; k < step.size(); ++k) CHECK(step[k] == doctest::Approx(1.0 - std::exp(-x[k])).epsilon(1e-6));

  REQUIRE(ra.metrics.fitted_rate);
  CHECK(*ra.metrics.fitted_rate == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("json output re-parses") {
  ScenarioConfig c = parse_config(kFlat);
  c.output.format = OutputFormat::Json;
  const fs::path dir = scratch("flat_json");
  run_scenario(c, dir);
  const auto j = nlohmann::json::parse(slurp(dir / "flat_decay_trajectory.json"));
  CHECK(j["columns"][1] == "sigma00");
  CHECK(j["rows"].size() == 51);
  CHECK(j["provenance"]["params"]["gamma0"] == 1.0);
  CHECK(equivalent(parse_config(j["provenance"]["config"].get<std::string>()), c));
}

TEST_CASE("detector without tunnelling") {
  const ScenarioConfig c = parse_config("[scenario]\ntype = detector\n[params]\n[integration]\nt_end = 3\nn_outputs = 4\n");
  const fs::path dir = scratch("detector_zero");
  run_scenario(c, dir);
  const Csv csv = read_csv(dir / "detector_counts.csv");
  CHECK(csv.header == std::vector<std::string>{"t", "P_0"});
  for (double p : csv.numbers("P_0")) CHECK(p == 1.0);
  const std::string dist = slurp(dir / "detector_distribution.csv");
  CHECK(dist.rfind("# D=0.00000000000e+00\n# t=3.00000000000e+00\n", 0) == 0);
}

TEST_CASE("bayes and projection scenarios") {
  const fs::path dir = scratch("bayes");
  run_scenario(parse_config("[scenario]\ntype = bayes\nt1 = 5\nn1 = 50\n[params]\nomega_pc = 1.2615662610100802\n"
                            "[integration]\nt_end = 10\n"),
               dir);  // D = 10
  const Csv csv = read_csv(dir / "bayes_distribution.csv");
  const auto n = csv.numbers("n");
  const auto cond = csv.numbers("conditioned");
  const auto bare = csv.numbers("unconditioned");
  double mc = 0, mb = 0, vc = 0, vb = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mc += n[i] * cond[i];
    mb += n[i] * bare[i];
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    vc += (n[i] - mc) * (n[i] - mc) * cond[i];
    vb += (n[i] - mb) * (n[i] - mb) * bare[i];
  }
  CHECK(mc == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(mb == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(vc == doctest::Approx(50.0).epsilon(1e-4));
  CHECK(vb == doctest::Approx(100.0).epsilon(1e-4));

  const fs::path pdir = scratch("projection");
  run_scenario(parse_config("[scenario]\ntype = projection\na = 1\ndt = 0.1\n[params]\n[integration]\nt_end = 10\n"),
               pdir);
  const Csv proj = read_csv(pdir / "projection.csv");
  CHECK(proj.rows.size() == 101);
  CHECK(proj.numbers("survival").back() == doctest::Approx(0.36603).epsilon(1e-4));
}

TEST_CASE("detuned cavity run: the two curves cross exactly once") {
  const fs::path dir = scratch("detuned");
  const RunResult r = run_scenario(parse_config(kFig7), dir);
  CHECK(count_crossings(read_csv(dir / "cavity_full.csv")) == 1);
  CHECK(count_crossings(read_csv(dir / "cavity_zoom.csv")) == 1);
  const auto j = nlohmann::json::parse(slurp(dir / "cavity_regime.json"));
  CHECK(j["regime"] == "AntiZeno");
  CHECK(j["t_star"].get<double>() > 0.0);
  CHECK(r.metrics.classification == "AntiZeno");
}

TEST_CASE("aligned sweep: ascending rows, strictly decreasing rate") {
  const fs::path dir = scratch("sweep_aligned");
  const SweepResult result = run_sweep(parse_config(kAlignedSweep), dir, 2);
  const Csv csv = read_csv(result.report);
  CHECK(csv.header == std::vector<std::string>{"param_value", "status", "fitted_rate", "predicted_rate",
                                               "rate_ratio", "classification", "t_star", "message"});
  const auto values = csv.numbers("param_value");
  CHECK(values == std::vector<double>{0.0, 1.0, 5.0, 10.0});
  const auto rates = csv.numbers("fitted_rate");
  for (std::size_t k = 1; k < rates.size(); ++k) CHECK(rates[k] < rates[k - 1]);
  for (const auto& row : csv.rows) CHECK(row[csv.column("status")] == "ok");
  CHECK(fs::exists(dir / "point_3" / "cavity_regime.json"));
}

TEST_CASE("sweep is independent of the job count") {
  const ScenarioConfig c = parse_config(kAlignedSweep);
  const fs::path one = scratch("jobs_1");
  const fs::path three = scratch("jobs_3");
  CHECK(slurp(run_sweep(c, one, 1).report) == slurp(run_sweep(c, three, 3).report));
  for (int k = 0; k < 4; ++k) {
    const std::string point = "point_" + std::to_string(k);
    CHECK(slurp(one / point / "cavity_full.csv") == slurp(three / point / "cavity_full.csv"));
  }
}

TEST_CASE("one-value sweep equals a run") {
  ScenarioConfig sweep = parse_config(kAlignedSweep);
  sweep.sweep->values = {5.0};
  ScenarioConfig single = sweep;
  single.sweep.reset();
  single.gamma_d = 5.0;

  const fs::path sdir = scratch("single_sweep");
  const fs::path rdir = scratch("single_run");
  const SweepResult s = run_sweep(sweep, sdir);
  const RunResult r = run_scenario(single, rdir);
  REQUIRE(s.rows.size() == 1);
  for (const auto& file : r.files) {
    CHECK(slurp(file) == slurp(sdir / "point_0" / file.filename()));
  }
  CHECK(s.rows[0].metrics.fitted_rate == r.metrics.fitted_rate);
}

TEST_CASE("detuned sweep reproduces the anti-Zeno rate ratio") {
  ScenarioConfig c = parse_config(kFig7);
  c.gamma_d.reset();
  c.sweep = SweepConfig{"gamma_d", {0.0, 10.0}};
  const SweepResult s = run_sweep(c, scratch("sweep_detuned"));
  REQUIRE(s.rows.size() == 2);
  CHECK(*s.rows[1].metrics.rate_ratio == doctest::Approx(0.084453 / 0.009975).epsilon(0.10));
  CHECK(s.rows[1].metrics.classification == "AntiZeno");
  CHECK(s.rows[0].metrics.classification == "Crossover");
}

TEST_CASE("a failing sweep point does not stop the others") {
  ScenarioConfig c = parse_config(kFlat);
  c.sweep = SweepConfig{"gamma0", {1.0, 0.1}};  // gamma0 = 0.1 needs t_end >= 50 for the rate fit
  const SweepResult s = run_sweep(c, scratch("sweep_failure"));
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].value == 0.1);
  CHECK_FALSE(s.rows[0].ok);
  CHECK_FALSE(s.rows[0].metrics.message.empty());
  CHECK(s.rows[1].ok);
  const Csv csv = read_csv(s.report);
  CHECK(csv.rows[0][csv.column("status")] == "error");
  CHECK(csv.rows[1][csv.column("status")] == "ok");
}

TEST_CASE("run refuses a sweep config and sweep needs one") {
  CHECK_THROWS_AS(run_scenario(parse_config(kAlignedSweep), scratch("refuse")), ConfigError);
  CHECK_THROWS_AS(run_sweep(parse_config(kFlat), scratch("refuse2")), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1.00000000000e+00");
  CHECK(format_number(-0.000123456789012345) == "-1.23456789012e-04");
  CHECK(format_number(INFINITY) == "inf");
}
