#include "zenosim/integrator.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "zenosim/errors.hpp"

namespace zenosim {

namespace odeint = boost::numeric::odeint;

double default_tolerance() {
  if (const char* env = std::getenv("ZENOSIM_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end != env && *end == '\0' && tol > 0.0 && std::isfinite(tol)) return tol;
    throw InvalidParams(std::string("ZENOSIM_TOL is not a positive number: ") + env);
  }
  return kDefaultTolerance;
}

IntegrationControl IntegrationControl::fixed(double step) {
  IntegrationControl c;
  c.method = Method::Rk4;
  c.step = step;
  return c;
}

IntegrationControl IntegrationControl::adaptive(double tolerance) {
  IntegrationControl c;
  c.method = Method::Dopri5;
  c.tolerance = tolerance;
  c.step = 1e-3;
  return c;
}

void IntegrationControl::check() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParams("integration step must be positive");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) throw InvalidParams("integration tolerance must be positive");
  if (max_steps == 0) throw InvalidParams("max_steps must be positive");
}

std::vector<double> uniform_times(double t_end, std::size_t n_outputs) {
  if (!(t_end > 0.0) || n_outputs < 2) throw InvalidParams("time grid needs t_end > 0 and at least two outputs");
  std::vector<double> t(n_outputs);
  for (std::size_t i = 0; i < n_outputs; ++i) {
    t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_outputs - 1);
  }
  t.back() = t_end;
  return t;
}

namespace {

struct System {
  const LinearGenerator& gen;
  void operator()(const StateVector& y, StateVector& dydt, double /*t*/) const { gen.apply(y, dydt); }
};

void require_finite(const StateVector& y, double t) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite state component at t = " << t;
      throw NonFiniteState(msg.str());
    }
  }
}

[[noreturn]] void step_limit(std::size_t max_steps, double t) {
  std::ostringstream msg;
  msg << "step limit " << max_steps << " exceeded at t = " << t;
  throw StepLimitExceeded(msg.str());
}

}  // namespace

Trajectory<StateVector> integrate(const LinearGenerator& gen, StateVector y0, std::span<const double> times,
                                  const IntegrationControl& ctl) {
  ctl.check();
  check_time_grid(times);
  if (y0.size() != gen.dimension()) throw InvalidParams("initial state dimension does not match the generator");
  require_finite(y0, 0.0);

  Trajectory<StateVector> out;
  out.times.assign(times.begin(), times.end());
  out.states.reserve(times.size());
  out.states.push_back(y0);

  const System sys{gen};
  StateVector y = std::move(y0);
  double t = 0.0;
  std::size_t steps = 0;

  if (ctl.method == Method::Rk4) {
    odeint::runge_kutta4<StateVector> stepper;
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double span = times[k] - t;
      const auto n_sub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / ctl.step - 1e-9)));
      const double h = span / static_cast<double>(n_sub);
      for (std::size_t i = 0; i < n_sub; ++i) {
        if (++steps > ctl.max_steps) step_limit(ctl.max_steps, t);
        stepper.do_step(sys, y, t, h);
        t = times[k - 1] + h * static_cast<double>(i + 1);
      }
      t = times[k];
      require_finite(y, t);
      out.states.push_back(y);
    }
    return out;
  }

  auto stepper = odeint::make_controlled(ctl.tolerance, ctl.tolerance, odeint::runge_kutta_dopri5<StateVector>());
  double dt = ctl.step;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (t < target) {
      const double remaining = target - t;
      const bool clamped = dt >= remaining;
      double trial = clamped ? remaining : dt;
      if (++steps > ctl.max_steps) step_limit(ctl.max_steps, t);
      // On success try_step advances t by the attempted step and replaces
      // `trial` with the controller's next suggestion.
      if (stepper.try_step(sys, y, t, trial) == odeint::success) {
        require_finite(y, t);
        if (clamped) {
          t = target;
          dt = std::max(dt, trial);
        } else {
          dt = trial;
        }
      } else {
        dt = trial;
        if (!(dt > 0.0) || t + dt == t) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t;
          throw StepLimitExceeded(msg.str());
        }
      }
    }
    out.states.push_back(y);
  }
  return out;
}

}  // namespace zenosim
