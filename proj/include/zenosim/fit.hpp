#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zenosim {

/// Least-squares fit of log y = log_amplitude - rate * t.
struct ExponentialFit {
  double rate = 0.0;
  double log_amplitude = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Fits samples with t in [t_lo, t_hi]. Throws FitFailure with fewer than two
/// samples in the window or a nonpositive value inside it.
ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi);

/// Least-squares polynomial coefficients c0..c_degree of y(t).
std::vector<double> fit_polynomial(std::span<const double> t, std::span<const double> y, std::size_t degree);

struct HalfMaximum {
  double peak_position = 0.0;
  double peak_value = 0.0;
  double fwhm = 0.0;
};

/// Peak sample and full width at half maximum from linearly interpolated
/// half-maximum crossings on either side of it. Throws FitFailure when a
/// crossing is missing.
HalfMaximum half_maximum(std::span<const double> x, std::span<const double> y);

}  // namespace zenosim
