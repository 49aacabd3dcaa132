#pragma once

#include <cstddef>

#include "zenosim/state.hpp"

namespace zenosim {

inline constexpr std::size_t kDefaultLevels = 2001;
/// Default half-bandwidth in units of the largest width of a scenario (the
/// band spans 40 widths in total).
inline constexpr double kDefaultBandwidthInWidths = 20.0;

inline double default_half_bandwidth(double largest_width) { return kDefaultBandwidthInWidths * largest_width; }

/// Uniform levels on [e_center - half_bandwidth, e_center + half_bandwidth]
/// with couplings sqrt(gamma0 * dE / 2pi), so 2*pi*rho*Omega^2 = gamma0 exactly.
ContinuumGrid discretize_flat_continuum(double gamma0, double e_center, double half_bandwidth, std::size_t n_levels);

/// Normalised Lorentzian density (gamma1 / 2pi) / ((e - e1)^2 + gamma1^2 / 4).
double lorentzian_density(double e, double e1, double gamma1);

/// Uniform levels centred on e1 whose squared couplings sample
/// total_coupling_sq * rho(E) * dE for the Lorentzian rho above; the sum of
/// squared couplings tends to total_coupling_sq as the band widens.
ContinuumGrid discretize_lorentzian_continuum(double total_coupling_sq, double e1, double gamma1,
                                              double half_bandwidth, std::size_t n_levels);

}  // namespace zenosim
