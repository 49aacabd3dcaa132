#include "zenosim/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zenosim/errors.hpp"
#include "zenosim/generators.hpp"
#include "zenosim/warnings.hpp"

namespace zenosim {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Zeno:
      return "Zeno";
    case Regime::AntiZeno:
      return "AntiZeno";
    case Regime::Crossover:
      return "Crossover";
  }
  return "Crossover";
}

namespace {

// Density matrix of dot (0), cavity (1) and reservoir levels (a). The cavity
// couples to the dot with W and to level a with g_a; eliminating the flat
// reservoir gives the cavity width G1. The detector dephases every coherence
// between dot-occupied and dot-empty states at Gd / 2.
class CavityGenerator final : public LinearGenerator {
 public:
  CavityGenerator(const ModelParams& p, const ContinuumGrid& grid, double gamma_d)
      : layout_{grid.size()},
        grid_(grid),
        w_(p.omega_alpha),
        gamma1_(p.gamma1),
        gamma_d_(gamma_d),
        e0_(p.e0),
        e1_(p.e1) {}

  std::size_t dimension() const override { return layout_.dimension(); }

  void apply(std::span<const double> y, std::span<double> dydt) const override {
    const double dot = y[CavityLayout::dot()];
    const double cav = y[CavityLayout::cavity()];
    const double x = y[layout_.dot_cavity_re()];
    const double z = y[layout_.dot_cavity_im()];
    const double eps10 = e1_ - e0_;
    const double kappa = (gamma1_ + gamma_d_) / 2.0;

    dydt[CavityLayout::dot()] = -2.0 * w_ * z;
    dydt[CavityLayout::cavity()] = -gamma1_ * cav + 2.0 * w_ * z;
    dydt[layout_.dot_cavity_re()] = -eps10 * z - kappa * x;
    dydt[layout_.dot_cavity_im()] = eps10 * x + w_ * (dot - cav) - kappa * z;

    double refilled = 0.0;
    for (std::size_t a = 0; a < layout_.levels; ++a) {
      const double g = grid_.couplings[a];
      const double e = grid_.energies[a];
      const double p = y[layout_.dot_level_re(a)];
      const double q = y[layout_.dot_level_im(a)];
      const double u = y[layout_.cavity_level_re(a)];
      const double v = y[layout_.cavity_level_im(a)];
      // sigma_0a' = i(E_a - E0) sigma_0a - i W sigma_1a + i g sigma_01 - Gd/2 sigma_0a
      dydt[layout_.dot_level_re(a)] = -(e - e0_) * q + w_ * v - g * z - gamma_d_ / 2.0 * p;
      dydt[layout_.dot_level_im(a)] = (e - e0_) * p - w_ * u + g * x - gamma_d_ / 2.0 * q;
      // sigma_1a' = i(E_a - E1) sigma_1a - i W sigma_0a + i g sigma_11 - G1/2 sigma_1a
      dydt[layout_.cavity_level_re(a)] = -(e - e1_) * v + w_ * q - gamma1_ / 2.0 * u;
      dydt[layout_.cavity_level_im(a)] = (e - e1_) * u - w_ * p + g * cav - gamma1_ / 2.0 * v;
      dydt[layout_.population(a)] = 2.0 * g * v;
      refilled += 2.0 * g * v;
    }
    dydt[layout_.sink()] = gamma1_ * cav - refilled;
  }

 private:
  CavityLayout layout_;
  const ContinuumGrid& grid_;
  double w_;
  double gamma1_;
  double gamma_d_;
  double e0_;
  double e1_;
};

void require_cavity(const ModelParams& p, double gamma_d) {
  validate_params(p);
  if (!(gamma_d >= 0.0) || !std::isfinite(gamma_d)) throw InvalidParams("gamma_d must be nonnegative");
  if (!(p.gamma1 + gamma_d > 0.0)) throw InvalidParams("cavity scenarios need gamma1 + gamma_d > 0");
}

void require_reservoir_grid(const ContinuumGrid& grid, double gamma1) {
  grid.check();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    if (std::abs(grid.width_at(a) - gamma1) > 1e-9 * std::max(1.0, gamma1)) {
      throw InvalidGrid("reservoir grid behind the cavity must reconstruct gamma1 at every level");
    }
  }
}

std::vector<double> survival_series(const ModelParams& params, double gamma_d, std::span<const double> times,
                                    const IntegrationControl& ctl) {
  const ContinuumGrid none;
  const CavityGenerator gen(params, none, gamma_d);
  const CavityLayout layout{0};
  const auto raw = integrate(gen, layout.pack(TracedState::cavity_initial(0)), times, ctl);
  std::vector<double> s;
  s.reserve(raw.size());
  for (const auto& y : raw.states) s.push_back(y[CavityLayout::dot()]);
  return s;
}

}  // namespace

std::unique_ptr<LinearGenerator> make_cavity_generator(const ModelParams& params, const ContinuumGrid& grid,
                                                       double gamma_d) {
  return std::make_unique<CavityGenerator>(params, grid, gamma_d);
}

Trajectory<TracedState> evolve_cavity(const ModelParams& params, const ContinuumGrid& grid, double gamma_d,
                                      std::span<const double> times, const IntegrationControl& ctl,
                                      double eps_trace) {
  require_cavity(params, gamma_d);
  require_reservoir_grid(grid, params.gamma1);
  const CavityGenerator gen(params, grid, gamma_d);
  const CavityLayout layout{grid.size()};
  const auto raw = integrate(gen, layout.pack(TracedState::cavity_initial(grid.size())), times, ctl);

  Trajectory<TracedState> out;
  out.times = raw.times;
  auto& survival = out.observables["survival"];
  auto& cavity = out.observables["cavity"];
  auto& continuum = out.observables["continuum"];
  auto& sink = out.observables["sink"];
  for (const auto& y : raw.states) {
    TracedState s = layout.unpack(y);
    s.check(eps_trace);
    survival.push_back(s.sigma00);
    cavity.push_back(*s.sigma11);
    continuum.push_back(s.continuum_population());
    sink.push_back(s.sink);
    out.states.push_back(std::move(s));
  }
  out.check();
  return out;
}

double effective_decay_rate(double omega_alpha, double gamma1, double gamma_d, double delta_e) {
  const double width = gamma1 + gamma_d;
  if (!(width > 0.0)) throw InvalidParams("effective rate needs gamma1 + gamma_d > 0");
  return 4.0 * width * omega_alpha * omega_alpha / (4.0 * delta_e * delta_e + width * width);
}

double short_time_survival(double omega_alpha, double t) {
  if (!(t >= 0.0)) throw InvalidParams("t must be nonnegative");
  if (omega_alpha * t > 0.2) {
    std::ostringstream msg;
    msg << "Omega t = " << omega_alpha * t << " is not small; the quadratic law is unreliable";
    warn(msg.str());
  }
  return 1.0 - omega_alpha * omega_alpha * t * t;
}

double rate_law_error_estimate(double omega_alpha, double gamma1, double gamma_d, double delta_e) {
  const double width = gamma1 + gamma_d;
  const double backflow = effective_decay_rate(omega_alpha, gamma1, gamma_d, delta_e) / gamma1;
  const double adiabatic = omega_alpha * omega_alpha / (delta_e * delta_e + width * width / 4.0);
  return backflow + adiabatic;
}

Regime regime_for(double delta_e, double gamma1, double gamma_d) {
  if (gamma_d == 0.0) return Regime::Crossover;
  const double q = 4.0 * delta_e * delta_e / (gamma1 * (gamma1 + gamma_d));
  if (q < 1.0 / 3.0) return Regime::Zeno;
  if (q > 3.0) return Regime::AntiZeno;
  return Regime::Crossover;
}

double cavity_survival(const ModelParams& params, double gamma_d, double t, const IntegrationControl& ctl) {
  require_cavity(params, gamma_d);
  if (t == 0.0) return 1.0;
  const double times[] = {0.0, t};
  return survival_series(params, gamma_d, times, ctl).back();
}

ExponentialFit fit_long_time_rate(const ModelParams& params, double gamma_d, const IntegrationControl& ctl) {
  require_cavity(params, gamma_d);
  if (params.omega_alpha == 0.0) {
    ExponentialFit frozen;
    frozen.r_squared = 1.0;
    return frozen;
  }
  const double delta_e = std::abs(params.e1 - params.e0);
  const double predicted = effective_decay_rate(params.omega_alpha, params.gamma1, gamma_d, delta_e);
  // Fast modes: cavity population (G1) and dot-cavity coherence ((G1 + Gd) / 2).
  const double fast = std::min(params.gamma1 > 0.0 ? params.gamma1 : std::numeric_limits<double>::infinity(),
                               (params.gamma1 + gamma_d) / 2.0);
  const double t_start = std::max(10.0 / fast, 5.0 / params.omega_alpha);
  const double t_end = t_start + std::min(4.0 / predicted, 2.0e4 / params.omega_alpha);

  const auto times = uniform_times(t_end, 4001);
  const auto survival = survival_series(params, gamma_d, times, ctl);

  // Stop the window once the survival reaches the integrator's noise floor.
  double t_stop = t_end;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= t_start && survival[k] < 1e-6) {
      t_stop = times[k > 0 ? k - 1 : 0];
      break;
    }
  }
  const ExponentialFit fit = fit_exponential(times, survival, t_start, t_stop);
  if (fit.samples < 20) throw FitFailure("long-time fit window holds fewer than 20 samples");
  if (fit.r_squared < 0.99) {
    std::ostringstream msg;
    msg << "no exponential long-time regime (R^2 = " << fit.r_squared << ")";
    throw FitFailure(msg.str());
  }
  return fit;
}

std::vector<double> fit_short_time_law(const ModelParams& params, double gamma_d, const IntegrationControl& ctl) {
  require_cavity(params, gamma_d);
  if (!(params.omega_alpha > 0.0)) throw InvalidParams("short-time law needs omega_alpha > 0");
  const auto times = uniform_times(0.05 / params.omega_alpha, 201);
  const auto survival = survival_series(params, gamma_d, times, ctl);
  return fit_polynomial(times, survival, 4);
}

double zeno_window(const ModelParams& params, double gamma_d) {
  require_cavity(params, gamma_d);
  if (gamma_d == 0.0 || params.omega_alpha == 0.0) return std::numeric_limits<double>::infinity();
  const ModelParams unmeasured_check = params;
  require_cavity(unmeasured_check, 0.0);

  const auto ctl = IntegrationControl::adaptive(1e-13);
  auto difference = [&](double t) {
    return cavity_survival(params, gamma_d, t, ctl) - cavity_survival(params, 0.0, t, ctl);
  };

  // Scan a short window first, then a long one sized by the slower decay.
  const double delta_e = std::abs(params.e1 - params.e0);
  const double slow = std::min(effective_decay_rate(params.omega_alpha, params.gamma1, 0.0, delta_e),
                               effective_decay_rate(params.omega_alpha, params.gamma1, gamma_d, delta_e));
  const double horizons[] = {2.0 / params.omega_alpha, 10.0 / slow + 20.0 / params.omega_alpha};
  for (double horizon : horizons) {
    const auto times = uniform_times(horizon, 2001);
    const auto measured = survival_series(params, gamma_d, times, ctl);
    const auto bare = survival_series(params, 0.0, times, ctl);
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (measured[k] - bare[k] >= 0.0) continue;
      double lo = times[k - 1];
      double hi = times[k];
      while (hi - lo > 1e-4 * hi) {
        const double mid = 0.5 * (lo + hi);
        (difference(mid) >= 0.0 ? lo : hi) = mid;
      }
      return lo;
    }
  }
  return std::numeric_limits<double>::infinity();
}

RegimeReport classify_regime(const ModelParams& params, double gamma_d, const IntegrationControl& ctl) {
  require_cavity(params, gamma_d);
  require_cavity(params, 0.0);
  RegimeReport r;
  r.detuning = std::abs(params.e0 - params.e1);
  r.total_width = params.gamma1 + gamma_d;
  r.predicted_rate = effective_decay_rate(params.omega_alpha, params.gamma1, gamma_d, r.detuning);

  const ExponentialFit measured = fit_long_time_rate(params, gamma_d, ctl);
  r.fitted_rate = measured.rate;
  if (gamma_d == 0.0) {
    r.unmeasured_rate = measured.rate;
    r.rate_ratio = 1.0;
    r.r_squared = measured.r_squared;
    r.regime = Regime::Crossover;
    r.t_star = std::numeric_limits<double>::infinity();
    return r;
  }
  const ExponentialFit bare = fit_long_time_rate(params, 0.0, ctl);
  r.unmeasured_rate = bare.rate;
  r.rate_ratio = bare.rate > 0.0 ? measured.rate / bare.rate : 1.0;
  r.r_squared = std::min(measured.r_squared, bare.r_squared);
  r.regime = regime_for(r.detuning, params.gamma1, gamma_d);
  r.t_star = zeno_window(params, gamma_d);
  return r;
}

}  // namespace zenosim
