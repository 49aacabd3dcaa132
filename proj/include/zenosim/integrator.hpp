#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zenosim/state.hpp"

namespace zenosim {

/// Linear action y -> L y on a packed real state vector.
class LinearGenerator {
 public:
  virtual ~LinearGenerator() = default;
  virtual std::size_t dimension() const = 0;
  virtual void apply(std::span<const double> y, std::span<double> dydt) const = 0;
};

enum class Method { Rk4, Dopri5 };

/// Default per-step error target for the adaptive method; the ZENOSIM_TOL
/// environment variable overrides it.
inline constexpr double kDefaultTolerance = 1e-9;
double default_tolerance();

struct IntegrationControl {
  Method method = Method::Dopri5;
  double step = 1e-2;            ///< fixed step (Rk4) or initial step guess (Dopri5)
  double tolerance = kDefaultTolerance;  ///< absolute and relative error target (Dopri5)
  std::size_t max_steps = 50'000'000;

  static IntegrationControl fixed(double step);
  static IntegrationControl adaptive(double tolerance = default_tolerance());

  void check() const;
};

using StateVector = std::vector<double>;

/// Integrates dy/dt = L y and returns snapshots at exactly the requested
/// times (times[0] must be 0 and is y0 itself).
///
/// Throws StepLimitExceeded once more than ctl.max_steps steps (accepted or
/// rejected) were taken, NonFiniteState as soon as a NaN/Inf appears.
Trajectory<StateVector> integrate(const LinearGenerator& gen, StateVector y0, std::span<const double> times,
                                  const IntegrationControl& ctl = IntegrationControl::adaptive());

/// n_outputs uniformly spaced times on [0, t_end].
std::vector<double> uniform_times(double t_end, std::size_t n_outputs);

}  // namespace zenosim
