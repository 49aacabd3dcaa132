#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zenosim/integrator.hpp"
#include "zenosim/params.hpp"

namespace zenosim {

/// Probabilities P_n of n electrons counted in the collector at `time`.
struct CountDistribution {
  std::vector<double> probabilities;
  double time = 0.0;
  double rate = 0.0;
  double leak = 0.0;  ///< probability that moved past n_max

  std::size_t n_max() const noexcept { return probabilities.empty() ? 0 : probabilities.size() - 1; }
  double total() const;
  double mean() const;
  double variance() const;
  std::size_t mode() const;

  /// All P_n >= 0 (to within eps) and total in [1 - eps_trunc, 1 + eps].
  void check(double eps_trunc = kDefaultTruncationTolerance, double eps = 1e-9) const;
};

/// A detector readout: N1 electrons counted by time t1.
struct ObservationRecord {
  double t1 = 0.0;
  std::size_t n1 = 0;
};

/// Count cutoff ceil(m + 10 sqrt(m)) for an expected count m.
std::size_t auto_count_cutoff(double expected_count);

/// Integrates dP_n/dt = -D P_n + D P_{n-1} from P_n(0) = delta_{n0}.
/// Without n_max the cutoff is sized automatically. Throws TruncationLeak when
/// more than eps_trunc escapes past n_max.
CountDistribution evolve_counts(double rate, double t_end, std::optional<std::size_t> n_max = std::nullopt,
                                const IntegrationControl& ctl = IntegrationControl::adaptive(),
                                double eps_trunc = kDefaultTruncationTolerance);

/// Same rate equation sampled at every time of `times`.
Trajectory<CountDistribution> evolve_counts_trajectory(double rate, std::span<const double> times,
                                                       std::optional<std::size_t> n_max = std::nullopt,
                                                       const IntegrationControl& ctl = IntegrationControl::adaptive(),
                                                       double eps_trunc = kDefaultTruncationTolerance);

/// (Dt)^n / n! e^{-Dt}, evaluated through log-gamma.
double poisson_counts(double rate, double t, std::size_t n);

/// Large-Dt Gaussian form of the Poisson distribution.
double poisson_gaussian(double rate, double t, double n);

/// Coherence between adjacent count sectors, i (D / Omega) P. Throws
/// DivisionByZero for omega == 0.
std::complex<double> coherence_magnitude(double rate, double omega, double p_diag);

/// Re-solves the rate equation from P_n(t1) = delta_{n,N1}; the result is the
/// shifted Poisson with mean N1 + D(t - t1) and variance D(t - t1).
/// Throws InvalidObservation unless t > t1.
CountDistribution bayes_update(double rate, const ObservationRecord& obs, double t,
                               std::optional<std::size_t> n_max = std::nullopt,
                               const IntegrationControl& ctl = IntegrationControl::adaptive(),
                               double eps_trunc = kDefaultTruncationTolerance);

/// Closed form of the conditioned distribution (shifted Poisson).
double bayes_exact(double rate, const ObservationRecord& obs, double t, std::size_t n);

/// Gaussian approximation of the conditioned distribution, valid for
/// D (t - t1) >> 1.
double bayes_gaussian(double rate, const ObservationRecord& obs, double t, double n);

}  // namespace zenosim
