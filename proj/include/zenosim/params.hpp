#pragma once

// Physical parameters of a scenario. Units: hbar = e = 1; energies and rates
// share one reference unit, times are in its inverse.

namespace zenosim {

inline constexpr double kPi = 3.14159265358979323846;

/// Default tolerance on total probability drift.
inline constexpr double kDefaultTraceTolerance = 1e-6;
/// Default tolerance on probability lost past the count cutoff.
inline constexpr double kDefaultTruncationTolerance = 1e-6;

struct ModelParams {
  double omega_pc = 0.0;     ///< point-contact hopping amplitude (gauge-real)
  double delta_omega = 0.0;  ///< hopping reduction while the dot is occupied
  double rho_l = 1.0;        ///< emitter density of states
  double rho_r = 1.0;        ///< collector density of states
  double bias = 1.0;         ///< mu_L - mu_R
  double e0 = 0.0;           ///< dot level
  double e1 = 0.0;           ///< cavity level
  double gamma0 = 0.0;       ///< bare decay width into a flat continuum
  double gamma1 = 0.0;       ///< cavity width
  double omega_alpha = 0.0;  ///< dot-continuum (or dot-cavity) coupling

  bool operator==(const ModelParams&) const = default;
};

/// Detector tunnelling rates with the dot empty (d) and occupied (d_prime),
/// and the decoherence rate they generate.
struct DetectorRates {
  double d = 0.0;
  double d_prime = 0.0;
  double gamma_d = 0.0;
};

/// Returns `p` unchanged when every invariant holds; throws InvalidParams naming
/// the first violated one otherwise.
ModelParams validate_params(const ModelParams& p);

DetectorRates derived_rates(const ModelParams& p);

}  // namespace zenosim
