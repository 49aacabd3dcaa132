#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zenosim/fit.hpp"
#include "zenosim/integrator.hpp"
#include "zenosim/params.hpp"
#include "zenosim/state.hpp"

namespace zenosim {

/// Energy distribution of the escaped electron, normalised to unit integral.
struct LineShape {
  std::vector<double> energies;
  std::vector<double> density;
  double peak_energy = 0.0;
  double fwhm = 0.0;

  /// Rectangle-rule integral with the given weights (uniform spacing if empty).
  double integral(std::span<const double> weights = {}) const;
};

/// Decay into a flat continuum with detector dephasing gamma_d (0 = unmeasured).
/// The grid must reconstruct params.gamma0 at every level. Initial state: dot
/// occupied. Observables: "survival", "continuum", "sink".
Trajectory<TracedState> evolve_bloch(const ModelParams& params, const ContinuumGrid& grid, double gamma_d,
                                     std::span<const double> times,
                                     const IntegrationControl& ctl = IntegrationControl::adaptive(),
                                     double eps_trace = kDefaultTraceTolerance);

double survival_analytic(double gamma0, double t);

/// Closed-form population of a continuum level with coupling `coupling` at
/// energy e_alpha in the unmeasured flat case.
double occupation_alpha_analytic(double gamma0, double e0, double coupling, double e_alpha, double t);
inline double occupation_alpha_analytic(const ModelParams& p, double e_alpha, double t) {
  return occupation_alpha_analytic(p.gamma0, p.e0, p.omega_alpha, e_alpha, t);
}

/// Unit-normalised Lorentzian of FWHM gamma0 + gamma_d centred at e0, sampled
/// on `energies`. peak_energy and fwhm are the exact values.
LineShape line_shape(double gamma0, double gamma_d, double e0, std::span<const double> energies);

/// Line shape sigma_aa * rho read off a state, normalised over the grid; peak
/// and FWHM from half-maximum crossings.
LineShape measure_line_shape(const TracedState& state, const ContinuumGrid& grid);

/// Time after which the flat-continuum line shape is taken as stationary.
inline double steady_state_time(double gamma0) { return 20.0 / gamma0; }

/// Joint detector-electron evolution resolved by detector count n.
/// Observables: "survival" (sum over n of sigma00), "mean_count", "current"
/// (d/dt of the mean count) and "leak".
Trajectory<CountResolvedState> evolve_n_resolved(const ModelParams& params, const ContinuumGrid& grid,
                                                 std::span<const double> times,
                                                 std::optional<std::size_t> n_max = std::nullopt,
                                                 const IntegrationControl& ctl = IntegrationControl::adaptive(),
                                                 double eps_trace = kDefaultTraceTolerance,
                                                 double eps_trunc = kDefaultTruncationTolerance);

/// Average detector current D' sigma00 + D (1 - sigma00).
double detector_current(double d, double d_prime, double sigma00);

/// d/dt of the mean detector count, evaluated from the count-resolved rate
/// equations at `state`.
double count_rate(const ModelParams& params, const ContinuumGrid& grid, const CountResolvedState& state);

/// Dot and continuum amplitudes of the unmeasured Schroedinger evolution.
struct AmplitudeState {
  Complex b0{1.0, 0.0};
  std::vector<Complex> b_alpha;

  double survival() const { return std::norm(b0); }
  double norm() const;
};

/// Direct integration of the single-electron Schroedinger equation on the
/// grid. Requires delta_omega == 0. Observables: "survival", "norm".
Trajectory<AmplitudeState> evolve_amplitudes_qd(const ModelParams& params, const ContinuumGrid& grid,
                                                std::span<const double> times,
                                                const IntegrationControl& ctl = IntegrationControl::adaptive());

/// [1 - a dt^2]^n. Throws InvalidStep unless 0 <= a dt^2 < 1.
double repeated_projection_survival(double a, double dt, std::size_t n);

/// [1 - a dt^2]^(t / dt): survival at fixed t under projections every dt.
double repeated_projection_at_time(double a, double dt, double t);

/// First-order form 1 - a dt t of the above, which tends to 1 as dt -> 0.
double repeated_projection_first_order(double a, double dt, double t);

/// Log-linear fit of sigma00 over [1, 5] / gamma0.
ExponentialFit measured_decay_rate(const Trajectory<TracedState>& traj, double gamma0);

}  // namespace zenosim
