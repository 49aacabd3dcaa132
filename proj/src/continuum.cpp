#include "zenosim/continuum.hpp"

#include <cmath>

#include "zenosim/errors.hpp"

namespace zenosim {

namespace {

ContinuumGrid uniform_levels(double e_center, double half_bandwidth, std::size_t n_levels) {
  if (n_levels < 2) throw InvalidGrid("a continuum grid needs at least two levels");
  if (!(half_bandwidth > 0.0) || !std::isfinite(half_bandwidth)) throw InvalidGrid("half_bandwidth must be positive");
  if (!std::isfinite(e_center)) throw InvalidGrid("band centre must be finite");
  ContinuumGrid g;
  const double spacing = 2.0 * half_bandwidth / static_cast<double>(n_levels - 1);
  g.energies.resize(n_levels);
  g.weights.assign(n_levels, spacing);
  for (std::size_t i = 0; i < n_levels; ++i) {
    g.energies[i] = e_center - half_bandwidth + spacing * static_cast<double>(i);
  }
  return g;
}

}  // namespace

ContinuumGrid discretize_flat_continuum(double gamma0, double e_center, double half_bandwidth, std::size_t n_levels) {
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) throw InvalidGrid("gamma0 must be nonnegative");
  ContinuumGrid g = uniform_levels(e_center, half_bandwidth, n_levels);
  g.couplings.assign(n_levels, std::sqrt(gamma0 * g.weights.front() / (2.0 * kPi)));
  g.check();
  return g;
}

double lorentzian_density(double e, double e1, double gamma1) {
  const double x = e - e1;
  return (gamma1 / (2.0 * kPi)) / (x * x + gamma1 * gamma1 / 4.0);
}

ContinuumGrid discretize_lorentzian_continuum(double total_coupling_sq, double e1, double gamma1,
                                              double half_bandwidth, std::size_t n_levels) {
  if (!(total_coupling_sq >= 0.0) || !std::isfinite(total_coupling_sq)) {
    throw InvalidGrid("total squared coupling must be nonnegative");
  }
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) throw InvalidGrid("gamma1 must be positive");
  ContinuumGrid g = uniform_levels(e1, half_bandwidth, n_levels);
  g.couplings.resize(n_levels);
  for (std::size_t i = 0; i < n_levels; ++i) {
    g.couplings[i] = std::sqrt(total_coupling_sq * lorentzian_density(g.energies[i], e1, gamma1) * g.weights[i]);
  }
  g.check();
  return g;
}

}  // namespace zenosim
