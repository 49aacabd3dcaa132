#include "zenosim/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "zenosim/cavity.hpp"
#include "zenosim/cli/output.hpp"
#include "zenosim/continuum.hpp"
#include "zenosim/detector.hpp"
#include "zenosim/errors.hpp"
#include "zenosim/flat_decay.hpp"

namespace zenosim::cli {

namespace {

std::string note(const char* key, double value) { return std::string(key) + "=" + format_number(value); }

RunResult run_detector(const ScenarioConfig& c, const std::filesystem::path& dir) {
  const double rate = derived_rates(c.params).d;
  const double t_end = c.integration.t_end;
  const auto times = uniform_times(t_end, c.integration.n_outputs);
  const std::size_t n_max = c.n_max.value_or(auto_count_cutoff(rate * t_end));
  const auto traj = evolve_counts_trajectory(rate, times, n_max, c.integration.control());

  Table counts{"detector_counts", {note("D", rate), "n_max=" + std::to_string(n_max)}, {"t"}, {}};
  for (std::size_t n = 0; n <= n_max; ++n) counts.columns.push_back("P_" + std::to_string(n));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<Cell> row{traj.times[k]};
    for (double p : traj.states[k].probabilities) row.emplace_back(p);
    counts.add_row(std::move(row));
  }

  const CountDistribution& last = traj.back();
  Table dist{"detector_distribution", {note("D", rate), note("t", t_end)}, {"n", "P_n"}, {}};
  for (std::size_t n = 0; n <= last.n_max(); ++n) {
    dist.add_row({index_cell(n), last.probabilities[n]});
  }

  RunResult out;
  out.files.push_back(write_table(counts, c, dir));
  out.files.push_back(write_table(dist, c, dir));
  return out;
}

ContinuumGrid flat_grid(const ScenarioConfig& c, double gamma_d) {
  const double width = c.params.gamma0 + gamma_d;
  return discretize_flat_continuum(c.params.gamma0, c.params.e0,
                                   c.grid.half_bandwidth.value_or(default_half_bandwidth(width)),
                                   c.grid.n_levels.value_or(kDefaultLevels));
}

RunResult run_flat_decay(const ScenarioConfig& c, const std::filesystem::path& dir) {
  const ModelParams& p = c.params;
  const double gamma_d = c.effective_gamma_d();
  const DetectorRates rates = derived_rates(p);
  const ContinuumGrid grid = flat_grid(c, gamma_d);
  const IntegrationControl ctl = c.integration.control();
  const auto times = uniform_times(c.integration.t_end, c.integration.n_outputs);
  const auto traj = evolve_bloch(p, grid, gamma_d, times, ctl);

  const auto& survival = traj.observables.at("survival");
  Table table{"flat_decay_trajectory",
              {note("gamma_d", gamma_d), note("D", rates.d), note("D_prime", rates.d_prime)},
              {"t", "sigma00", "analytic", "continuum", "sink", "current"},
              {}};
  for (std::size_t k = 0; k < traj.size(); ++k) {
    table.add_row({traj.times[k], survival[k], survival_analytic(p.gamma0, traj.times[k]),
                   traj.observables.at("continuum")[k], traj.observables.at("sink")[k],
                   detector_current(rates.d, rates.d_prime, survival[k])});
  }

  RunResult out;
  out.files.push_back(write_table(table, c, dir));

  if (rates.d > 0.0) {
    Table current{"flat_decay_current", {note("D", rates.d), note("D_prime", rates.d_prime)},
                  {"gamma0_t", "current_over_d", "normalized_step"}, {}};
    const double span = rates.d - rates.d_prime;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double i = detector_current(rates.d, rates.d_prime, survival[k]);
      current.add_row({p.gamma0 * traj.times[k], i / rates.d,
                       span > 0.0 ? (i - rates.d_prime) / span : std::numeric_limits<double>::quiet_NaN()});
    }
    out.files.push_back(write_table(current, c, dir));
  }

  const double t_ss = steady_state_time(p.gamma0);
  const double ss_times[] = {0.0, t_ss};
  const auto steady = evolve_bloch(p, grid, gamma_d, ss_times, ctl);
  const LineShape measured = measure_line_shape(steady.back(), grid);
  const LineShape expected = line_shape(p.gamma0, gamma_d, p.e0, grid.energies);
  Table line{"flat_decay_line_shape",
             {note("t", t_ss), note("fwhm", measured.fwhm), note("peak_energy", measured.peak_energy),
              note("expected_fwhm", expected.fwhm)},
             {"energy", "density", "lorentzian"},
             {}};
  for (std::size_t a = 0; a < grid.size(); ++a) {
    line.add_row({grid.energies[a], measured.density[a], expected.density[a]});
  }
  out.files.push_back(write_table(line, c, dir));

  try {
    const ExponentialFit fit = measured_decay_rate(traj, p.gamma0);
    out.metrics.fitted_rate = fit.rate;
    out.metrics.rate_ratio = fit.rate / p.gamma0;
  } catch (const FitFailure& e) {
    out.metrics.message = e.what();
  }
  out.metrics.predicted_rate = p.gamma0;
  return out;
}

nlohmann::ordered_json json_number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

RunResult run_cavity(const ScenarioConfig& c, const std::filesystem::path& dir) {
  const ModelParams& p = c.params;
  const double gamma_d = c.effective_gamma_d();
  const IntegrationControl ctl = c.integration.control();
  ContinuumGrid reservoir;
  if (c.grid.n_levels.value_or(0) > 0) {
    reservoir = discretize_flat_continuum(p.gamma1, p.e1,
                                          c.grid.half_bandwidth.value_or(default_half_bandwidth(p.gamma1)),
                                          *c.grid.n_levels);
  }

  const double t_end = c.integration.t_end;
  const double zoom_end = p.omega_alpha > 0.0 ? std::min(t_end, 2.0 / p.omega_alpha) : t_end;
  RunResult out;
  for (const auto& [name, horizon] : {std::pair{"cavity_full", t_end}, std::pair{"cavity_zoom", zoom_end}}) {
    const auto times = uniform_times(horizon, c.integration.n_outputs);
    const auto bare = evolve_cavity(p, reservoir, 0.0, times, ctl);
    const auto measured = evolve_cavity(p, reservoir, gamma_d, times, ctl);
    Table table{name, {note("gamma_d", gamma_d)}, {"t", "sigma00_unmeasured", "sigma00_measured"}, {}};
    for (std::size_t k = 0; k < times.size(); ++k) {
      table.add_row({times[k], bare.observables.at("survival")[k], measured.observables.at("survival")[k]});
    }
    out.files.push_back(write_table(table, c, dir));
  }

  nlohmann::ordered_json j;
  j["provenance"]["scenario"] = "cavity";
  j["provenance"]["config"] = serialize_config(c);
  j["gamma_d"] = gamma_d;
  try {
    const RegimeReport r = classify_regime(p, gamma_d, ctl);
    j["status"] = "ok";
    j["detuning"] = r.detuning;
    j["total_width"] = r.total_width;
    j["regime"] = std::string(to_string(r.regime));
    j["fitted_rate"] = r.fitted_rate;
    j["predicted_rate"] = r.predicted_rate;
    j["unmeasured_rate"] = r.unmeasured_rate;
    j["rate_ratio"] = r.rate_ratio;
    j["t_star"] = json_number(r.t_star);
    j["r_squared"] = r.r_squared;
    out.metrics.fitted_rate = r.fitted_rate;
    out.metrics.predicted_rate = r.predicted_rate;
    out.metrics.rate_ratio = r.rate_ratio;
    out.metrics.classification = std::string(to_string(r.regime));
    out.metrics.t_star = r.t_star;
  } catch (const FitFailure& e) {
    j["status"] = "fit-failure";
    j["message"] = e.what();
    out.metrics.message = e.what();
    out.metrics.predicted_rate =
        effective_decay_rate(p.omega_alpha, p.gamma1, gamma_d, std::abs(p.e1 - p.e0));
  }
  const auto path = dir / "cavity_regime.json";
  write_file(path, j.dump(1) + "\n");
  out.files.push_back(path);
  return out;
}

RunResult run_bayes(const ScenarioConfig& c, const std::filesystem::path& dir) {
  const double rate = derived_rates(c.params).d;
  const double t = c.integration.t_end;
  const ObservationRecord obs{c.t1, c.n1};
  const std::size_t n_max = c.n_max.value_or(std::max(auto_count_cutoff(c.n1 + rate * (t - c.t1)),
                                                      auto_count_cutoff(rate * t)));
  const IntegrationControl ctl = c.integration.control();
  const CountDistribution cond = bayes_update(rate, obs, t, n_max, ctl);
  const CountDistribution bare = evolve_counts(rate, t, n_max, ctl);

  Table table{"bayes_distribution",
              {note("D", rate), note("t1", c.t1), "n1=" + std::to_string(c.n1), note("t", t),
               note("conditioned_mean", cond.mean()), note("conditioned_variance", cond.variance()),
               note("unconditioned_mean", bare.mean()), note("unconditioned_variance", bare.variance())},
              {"n", "conditioned", "unconditioned", "gaussian"},
              {}};
  for (std::size_t n = 0; n <= n_max; ++n) {
    table.add_row({index_cell(n), cond.probabilities[n], bare.probabilities[n],
                   rate > 0.0 && t > c.t1 ? bayes_gaussian(rate, obs, t, static_cast<double>(n))
                                          : std::numeric_limits<double>::quiet_NaN()});
  }
  RunResult out;
  out.files.push_back(write_table(table, c, dir));
  return out;
}

RunResult run_projection(const ScenarioConfig& c, const std::filesystem::path& dir) {
  const double t_end = c.integration.t_end;
  const auto steps = static_cast<std::size_t>(std::floor(t_end / c.dt + 1e-9));
  Table table{"projection", {note("a", c.a), note("dt", c.dt)}, {"t", "survival", "first_order"}, {}};
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * c.dt;
    table.add_row({t, repeated_projection_survival(c.a, c.dt, k), repeated_projection_first_order(c.a, c.dt, t)});
  }
  Table limit{"projection_limit", {note("a", c.a), note("t", t_end)}, {"dt", "survival"}, {}};
  for (double dt = c.dt; dt >= c.dt * 1e-3 * (1.0 - 1e-12); dt /= 10.0) {
    limit.add_row({dt, repeated_projection_at_time(c.a, dt, t_end)});
  }
  RunResult out;
  out.files.push_back(write_table(table, c, dir));
  out.files.push_back(write_table(limit, c, dir));
  return out;
}

Cell optional_cell(const std::optional<double>& v) {
  if (!v) return std::string();
  return *v;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& dir) {
  if (config.sweep) throw ConfigError("config has a [sweep] block; use the sweep command", 0, "sweep");
  validate_config(config);
  std::filesystem::create_directories(dir);
  switch (config.type) {
    case ScenarioType::Detector:
      return run_detector(config, dir);
    case ScenarioType::FlatDecay:
      return run_flat_decay(config, dir);
    case ScenarioType::Cavity:
      return run_cavity(config, dir);
    case ScenarioType::Bayes:
      return run_bayes(config, dir);
    case ScenarioType::Projection:
      return run_projection(config, dir);
  }
  throw ConfigError("unknown scenario type", 0, "scenario.type");
}

SweepResult run_sweep(const ScenarioConfig& config, const std::filesystem::path& dir, unsigned jobs) {
  if (!config.sweep) throw ConfigError("config has no [sweep] block", 0, "sweep");
  validate_config(config);

  std::vector<double> values = config.sweep->values;
  std::stable_sort(values.begin(), values.end());

  SweepResult result;
  result.rows.resize(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      SweepRow& row = result.rows[k];
      row.value = values[k];
      ScenarioConfig point = config;
      point.sweep.reset();
      set_sweep_parameter(point, config.sweep->parameter, values[k]);
      try {
        row.metrics = run_scenario(point, dir / ("point_" + std::to_string(k))).metrics;
        row.ok = row.metrics.message.empty();
      } catch (const std::exception& e) {
        row.ok = false;
        row.metrics.message = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Table report{"sweep_report",
               {"parameter=" + config.sweep->parameter},
               {"param_value", "status", "fitted_rate", "predicted_rate", "rate_ratio", "classification", "t_star",
                "message"},
               {}};
  for (const auto& row : result.rows) {
    std::string message = row.metrics.message;
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    report.add_row({row.value, std::string(row.ok ? "ok" : "error"), optional_cell(row.metrics.fitted_rate),
                    optional_cell(row.metrics.predicted_rate), optional_cell(row.metrics.rate_ratio),
                    row.metrics.classification, optional_cell(row.metrics.t_star), message});
  }
  result.report = write_table(report, config, dir);
  return result;
}

}  // namespace zenosim::cli
