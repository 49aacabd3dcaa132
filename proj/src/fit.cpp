#include "zenosim/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "zenosim/errors.hpp"

namespace zenosim {

ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi) {
  if (t.size() != y.size()) throw FitFailure("time and value series differ in length");
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> window;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(y[i] > 0.0)) throw FitFailure("nonpositive value inside the exponential fit window");
    const double ly = std::log(y[i]);
    window.emplace_back(t[i], ly);
    n += 1.0;
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
  }
  if (window.size() < 2) throw FitFailure("fewer than two samples in the exponential fit window");
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw FitFailure("degenerate exponential fit window");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  const double mean = sy / n;
  double ss_tot = 0.0, ss_res = 0.0;
  for (const auto& [x, ly] : window) {
    const double r = ly - (intercept + slope * x);
    ss_res += r * r;
    ss_tot += (ly - mean) * (ly - mean);
  }
  ExponentialFit fit;
  fit.rate = -slope;
  fit.log_amplitude = intercept;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.samples = window.size();
  return fit;
}

std::vector<double> fit_polynomial(std::span<const double> t, std::span<const double> y, std::size_t degree) {
  if (t.size() != y.size()) throw FitFailure("time and value series differ in length");
  if (t.size() < degree + 1) throw FitFailure("not enough samples for the polynomial degree");
  // Scale the abscissa to [-1, 1]-ish for conditioning, then undo the scaling.
  const double scale = std::max(std::abs(*std::max_element(t.begin(), t.end())),
                                std::abs(*std::min_element(t.begin(), t.end())));
  const double s = scale > 0.0 ? scale : 1.0;
  const auto rows = static_cast<Eigen::Index>(t.size());
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double p = 1.0;
    const double u = t[static_cast<std::size_t>(i)] / s;
    for (Eigen::Index k = 0; k < cols; ++k) {
      a(i, k) = p;
      p *= u;
    }
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  std::vector<double> coeffs(degree + 1);
  double factor = 1.0;
  for (std::size_t k = 0; k <= degree; ++k) {
    coeffs[k] = c(static_cast<Eigen::Index>(k)) / factor;
    factor *= s;
  }
  return coeffs;
}

HalfMaximum half_maximum(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw FitFailure("line shape needs at least three samples");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const auto peak = static_cast<std::size_t>(peak_it - y.begin());
  const double half = *peak_it / 2.0;

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double f = (y[inside] - half) / (y[inside] - y[outside]);
    return x[inside] + f * (x[outside] - x[inside]);
  };

  std::size_t left = peak;
  while (left > 0 && y[left - 1] > half) --left;
  if (left == 0) throw FitFailure("no half-maximum crossing below the peak");
  std::size_t right = peak;
  while (right + 1 < y.size() && y[right + 1] > half) ++right;
  if (right + 1 == y.size()) throw FitFailure("no half-maximum crossing above the peak");

  HalfMaximum h;
  h.peak_position = x[peak];
  h.peak_value = *peak_it;
  h.fwhm = crossing(right, right + 1) - crossing(left, left - 1);
  return h;
}

}  // namespace zenosim
