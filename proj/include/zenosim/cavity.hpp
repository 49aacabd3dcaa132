#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "zenosim/fit.hpp"
#include "zenosim/integrator.hpp"
#include "zenosim/params.hpp"
#include "zenosim/state.hpp"

namespace zenosim {

enum class Regime { Zeno, AntiZeno, Crossover };

std::string_view to_string(Regime r);

/// Measured versus unmeasured decay through the cavity for one parameter point.
struct RegimeReport {
  double detuning = 0.0;       ///< |E0 - E1|
  double total_width = 0.0;    ///< Gamma1 + Gamma_d
  Regime regime = Regime::Crossover;
  double fitted_rate = 0.0;    ///< long-time rate with the detector
  double predicted_rate = 0.0; ///< effective_decay_rate for the same point
  double unmeasured_rate = 0.0;
  double rate_ratio = 1.0;     ///< fitted_rate / unmeasured_rate
  double t_star = 0.0;         ///< end of the short-time Zeno window (inf when the curves never cross)
  double r_squared = 0.0;      ///< worse of the two long-time fits
};

/// Dot coupled to a cavity (coupling omega_alpha, width gamma1) that empties
/// into a flat reservoir described by `grid` (built with width gamma1; may be
/// empty). Initial state: dot occupied. Observables: "survival", "cavity",
/// "continuum", "sink".
Trajectory<TracedState> evolve_cavity(const ModelParams& params, const ContinuumGrid& grid, double gamma_d,
                                      std::span<const double> times,
                                      const IntegrationControl& ctl = IntegrationControl::adaptive(),
                                      double eps_trace = kDefaultTraceTolerance);

/// 4 (G1 + Gd) W^2 / (4 dE^2 + (G1 + Gd)^2).
double effective_decay_rate(double omega_alpha, double gamma1, double gamma_d, double delta_e);

/// 1 - W^2 t^2; warns when W t is not small.
double short_time_survival(double omega_alpha, double t);

/// First-order relative error of effective_decay_rate against the exact
/// long-time rate: cavity back-flow G_eff / G1 plus W^2 / (dE^2 + (G1 + Gd)^2 / 4).
double rate_law_error_estimate(double omega_alpha, double gamma1, double gamma_d, double delta_e);

/// Points with rate_law_error_estimate at or below this count as weak damping.
inline constexpr double kWeakDampingThreshold = 0.04;

/// Regime from q = 4 dE^2 / (G1 (G1 + Gd)): the predicted rate exceeds the
/// unmeasured one iff q > 1. Zeno below 1/3, AntiZeno above 3.
Regime regime_for(double delta_e, double gamma1, double gamma_d);

/// Dot survival at a single time (no reservoir levels).
double cavity_survival(const ModelParams& params, double gamma_d, double t, const IntegrationControl& ctl);

/// Log-linear fit of the long-time survival past the cavity transients.
/// Throws FitFailure when the window is too short or R^2 < 0.99.
ExponentialFit fit_long_time_rate(const ModelParams& params, double gamma_d,
                                  const IntegrationControl& ctl = IntegrationControl::adaptive());

/// Coefficients c0..c4 of a quartic least-squares fit of the survival over
/// t in [0, 0.05 / omega_alpha].
std::vector<double> fit_short_time_law(const ModelParams& params, double gamma_d,
                                       const IntegrationControl& ctl = IntegrationControl::adaptive(1e-13));

/// Largest t* with measured survival >= unmeasured survival on [0, t*]:
/// first sign change of their difference, refined by bisection to 1e-4
/// relative. Infinity when no crossing is found.
double zeno_window(const ModelParams& params, double gamma_d);

RegimeReport classify_regime(const ModelParams& params, double gamma_d,
                             const IntegrationControl& ctl = IntegrationControl::adaptive());

}  // namespace zenosim
