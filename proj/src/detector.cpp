#include "zenosim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zenosim/errors.hpp"
#include "zenosim/generators.hpp"
#include "zenosim/warnings.hpp"

namespace zenosim {

double CountDistribution::total() const {
  double s = 0.0;
  for (double p : probabilities) s += p;
  return s;
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < probabilities.size(); ++n) m += static_cast<double>(n) * probabilities[n];
  return m / total();
}

double CountDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t n = 0; n < probabilities.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    v += d * d * probabilities[n];
  }
  return v / total();
}

std::size_t CountDistribution::mode() const {
  return static_cast<std::size_t>(std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

void CountDistribution::check(double eps_trunc, double eps) const {
  for (double p : probabilities) {
    if (!(p >= -eps)) throw InvariantViolation("negative count probability");
  }
  const double sum = total();
  if (!(sum >= 1.0 - eps_trunc - eps && sum <= 1.0 + eps)) {
    std::ostringstream msg;
    msg << "count distribution sums to " << sum;
    throw TruncationLeak(msg.str());
  }
}

std::size_t auto_count_cutoff(double expected_count) {
  if (!(expected_count >= 0.0)) throw InvalidParams("expected count must be nonnegative");
  return static_cast<std::size_t>(std::ceil(expected_count + 10.0 * std::sqrt(expected_count)));
}

namespace {

/// P_n' = -D P_n + D P_{n-1} for n = 0..n_max, plus an overflow slot fed by P_{n_max}.
class CountingGenerator final : public LinearGenerator {
 public:
  CountingGenerator(double rate, std::size_t n_max) : rate_(rate), n_max_(n_max) {}

  std::size_t dimension() const override { return n_max_ + 2; }

  void apply(std::span<const double> y, std::span<double> dydt) const override {
    dydt[0] = -rate_ * y[0];
    for (std::size_t n = 1; n <= n_max_; ++n) dydt[n] = rate_ * (y[n - 1] - y[n]);
    dydt[n_max_ + 1] = rate_ * y[n_max_];
  }

 private:
  double rate_;
  std::size_t n_max_;
};

void require_rate(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidParams("detector rate must be nonnegative");
}

CountDistribution to_distribution(std::span<const double> y, std::size_t n_max, double rate, double time) {
  CountDistribution d;
  d.probabilities.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_max + 1));
  d.leak = y[n_max + 1];
  d.rate = rate;
  d.time = time;
  return d;
}

void check_leak(const CountDistribution& d, double eps_trunc) {
  if (!(d.leak <= eps_trunc)) {
    std::ostringstream msg;
    msg << "probability " << d.leak << " leaked past n_max = " << d.n_max() << " by t = " << d.time
        << " (allowed " << eps_trunc << ")";
    throw TruncationLeak(msg.str());
  }
  d.check(eps_trunc);
}

Trajectory<CountDistribution> run_counts(double rate, std::span<const double> elapsed, double t_offset,
                                         std::size_t start, std::size_t n_max, const IntegrationControl& ctl,
                                         double eps_trunc) {
  const CountingGenerator gen(rate, n_max);
  StateVector y0(gen.dimension(), 0.0);
  y0[start] = 1.0;
  const auto raw = integrate(gen, std::move(y0), elapsed, ctl);
  Trajectory<CountDistribution> out;
  out.times = raw.times;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.states.push_back(to_distribution(raw.states[k], n_max, rate, raw.times[k] + t_offset));
    check_leak(out.states.back(), eps_trunc);
  }
  return out;
}

}  // namespace

std::unique_ptr<LinearGenerator> make_counting_generator(double rate, std::size_t n_max) {
  return std::make_unique<CountingGenerator>(rate, n_max);
}

Trajectory<CountDistribution> evolve_counts_trajectory(double rate, std::span<const double> times,
                                                       std::optional<std::size_t> n_max,
                                                       const IntegrationControl& ctl, double eps_trunc) {
  require_rate(rate);
  check_time_grid(times);
  const std::size_t cutoff = n_max.value_or(auto_count_cutoff(rate * times.back()));
  auto traj = run_counts(rate, times, 0.0, 0, cutoff, ctl, eps_trunc);
  traj.check();
  return traj;
}

CountDistribution evolve_counts(double rate, double t_end, std::optional<std::size_t> n_max,
                                const IntegrationControl& ctl, double eps_trunc) {
  require_rate(rate);
  if (!(t_end >= 0.0)) throw InvalidParams("t_end must be nonnegative");
  const std::size_t cutoff = n_max.value_or(auto_count_cutoff(rate * t_end));
  if (t_end == 0.0) {
    CountDistribution d;
    d.probabilities.assign(cutoff + 1, 0.0);
    d.probabilities[0] = 1.0;
    d.rate = rate;
    return d;
  }
  const double times[] = {0.0, t_end};
  return run_counts(rate, times, 0.0, 0, cutoff, ctl, eps_trunc).back();
}

double poisson_counts(double rate, double t, std::size_t n) {
  const double mean = rate * t;
  if (!(mean >= 0.0)) throw InvalidParams("D t must be nonnegative");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(n);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

double poisson_gaussian(double rate, double t, double n) {
  const double mean = rate * t;
  if (!(mean > 0.0)) throw InvalidParams("Gaussian form needs D t > 0");
  const double d = mean - n;
  return std::exp(-d * d / (2.0 * mean)) / std::sqrt(2.0 * kPi * mean);
}

std::complex<double> coherence_magnitude(double rate, double omega, double p_diag) {
  if (omega == 0.0) throw DivisionByZero("coherence needs a nonzero hopping amplitude");
  return {0.0, rate / omega * p_diag};
}

namespace {

void check_observation(const ObservationRecord& obs, double t) {
  if (!(obs.t1 >= 0.0)) throw InvalidObservation("observation time must be nonnegative");
  if (!(t > obs.t1)) throw InvalidObservation("conditioned time must be later than the observation time");
}

}  // namespace

CountDistribution bayes_update(double rate, const ObservationRecord& obs, double t, std::optional<std::size_t> n_max,
                               const IntegrationControl& ctl, double eps_trunc) {
  require_rate(rate);
  check_observation(obs, t);
  const double elapsed = t - obs.t1;
  if (rate * elapsed < 10.0) {
    std::ostringstream msg;
    msg << "D (t - t1) = " << rate * elapsed << " is not >> 1; the Gaussian companion form is unreliable here";
    warn(msg.str());
  }
  const std::size_t cutoff = n_max.value_or(obs.n1 + auto_count_cutoff(rate * elapsed));
  if (cutoff < obs.n1) throw InvalidObservation("n_max is below the observed count");
  const double times[] = {0.0, elapsed};
  return run_counts(rate, times, obs.t1, obs.n1, cutoff, ctl, eps_trunc).back();
}

double bayes_exact(double rate, const ObservationRecord& obs, double t, std::size_t n) {
  check_observation(obs, t);
  if (n < obs.n1) return 0.0;
  return poisson_counts(rate, t - obs.t1, n - obs.n1);
}

double bayes_gaussian(double rate, const ObservationRecord& obs, double t, double n) {
  check_observation(obs, t);
  const double spread = rate * (t - obs.t1);
  if (!(spread > 0.0)) throw InvalidParams("Gaussian form needs D (t - t1) > 0");
  const double shift = static_cast<double>(obs.n1) - rate * obs.t1;
  const double d = rate * t - n + shift;
  return std::exp(-d * d / (2.0 * spread)) / std::sqrt(2.0 * kPi * spread);
}

}  // namespace zenosim
