#include "zenosim/state.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "zenosim/errors.hpp"

namespace zenosim {

double ContinuumGrid::width_at(std::size_t i) const {
  return 2.0 * kPi * couplings.at(i) * couplings.at(i) / weights.at(i);
}

void ContinuumGrid::check() const {
  if (couplings.size() != energies.size() || weights.size() != energies.size()) {
    throw InvalidGrid("energies, couplings and weights must have equal length");
  }
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i]) || !std::isfinite(couplings[i]) || !std::isfinite(weights[i])) {
      throw InvalidGrid("grid entries must be finite");
    }
    if (weights[i] <= 0.0) throw InvalidGrid("grid weights must be positive");
    if (i > 0 && energies[i] <= energies[i - 1]) throw InvalidGrid("grid energies must strictly increase");
  }
}

double TracedState::continuum_population() const {
  return std::accumulate(sigma_alpha_alpha.begin(), sigma_alpha_alpha.end(), 0.0);
}

double TracedState::resolved_trace() const {
  return sigma00 + sigma11.value_or(0.0) + continuum_population();
}

void TracedState::check(double eps_trace) const {
  auto diagonal_ok = [eps_trace](double p) { return std::isfinite(p) && p >= -eps_trace && p <= 1.0 + eps_trace; };
  if (!diagonal_ok(sigma00)) throw InvariantViolation("sigma00 outside [0, 1]");
  if (sigma11 && !diagonal_ok(*sigma11)) throw InvariantViolation("sigma11 outside [0, 1]");
  if (!diagonal_ok(sink)) throw InvariantViolation("sink population outside [0, 1]");
  for (double p : sigma_alpha_alpha) {
    if (!diagonal_ok(p)) throw InvariantViolation("continuum population outside [0, 1]");
  }
  const double drift = std::abs(trace() - 1.0);
  if (!(drift <= eps_trace)) {
    std::ostringstream msg;
    msg << "trace drift " << drift << " exceeds " << eps_trace;
    throw InvariantViolation(msg.str());
  }
}

TracedState TracedState::flat_initial(std::size_t n_levels) {
  TracedState s;
  s.sigma_alpha_alpha.assign(n_levels, 0.0);
  s.sigma_alpha_0.assign(n_levels, Complex{});
  return s;
}

TracedState TracedState::cavity_initial(std::size_t n_levels) {
  TracedState s;
  s.sigma11 = 0.0;
  s.sigma_alpha_alpha.assign(n_levels, 0.0);
  s.sigma_0alpha.assign(n_levels, Complex{});
  s.sigma_1alpha.assign(n_levels, Complex{});
  return s;
}

double CountResolvedState::total_trace() const {
  double total = 0.0;
  for (const auto& block : blocks) total += block.trace();
  return total;
}

TracedState CountResolvedState::traced() const {
  if (blocks.empty()) return {};
  TracedState sum = blocks.front();
  for (std::size_t n = 1; n < blocks.size(); ++n) {
    const auto& b = blocks[n];
    sum.sigma00 += b.sigma00;
    sum.sink += b.sink;
    for (std::size_t a = 0; a < sum.sigma_alpha_alpha.size(); ++a) {
      sum.sigma_alpha_alpha[a] += b.sigma_alpha_alpha[a];
      sum.sigma_alpha_0[a] += b.sigma_alpha_0[a];
    }
  }
  return sum;
}

std::vector<double> CountResolvedState::count_marginal() const {
  std::vector<double> p;
  p.reserve(blocks.size());
  for (const auto& block : blocks) p.push_back(block.trace());
  return p;
}

double CountResolvedState::mean_count() const {
  double mean = 0.0;
  for (std::size_t n = 0; n < blocks.size(); ++n) mean += static_cast<double>(n) * blocks[n].trace();
  return mean;
}

void CountResolvedState::check(double eps_trace, double eps_trunc) const {
  if (blocks.size() != n_max + 1) throw InvariantViolation("count-resolved state must hold n_max + 1 blocks");
  const double drift = std::abs(total_trace() + overflow - 1.0);
  if (!(drift <= eps_trace)) {
    std::ostringstream msg;
    msg << "count-resolved trace drift " << drift << " exceeds " << eps_trace;
    throw InvariantViolation(msg.str());
  }
  if (!(overflow <= eps_trunc)) {
    std::ostringstream msg;
    msg << "probability " << overflow << " leaked past n_max = " << n_max << " (allowed " << eps_trunc << ")";
    throw TruncationLeak(msg.str());
  }
}

void check_time_grid(std::span<const double> times) {
  if (times.empty()) throw InvariantViolation("time grid is empty");
  if (times.front() != 0.0) throw InvariantViolation("time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvariantViolation("time grid must strictly increase");
  }
}

void throw_trajectory_mismatch(const std::string& what, std::size_t got, std::size_t expected) {
  std::ostringstream msg;
  msg << "trajectory series '" << what << "' has " << got << " entries, expected " << expected;
  throw InvariantViolation(msg.str());
}

std::vector<double> FlatLayout::pack(const TracedState& s) const {
  if (s.sigma_alpha_alpha.size() != levels || s.sigma_alpha_0.size() != levels) {
    throw InvariantViolation("flat state does not match layout");
  }
  std::vector<double> y(dimension());
  y[dot()] = s.sigma00;
  y[sink()] = s.sink;
  for (std::size_t a = 0; a < levels; ++a) {
    y[population(a)] = s.sigma_alpha_alpha[a];
    y[coherence_re(a)] = s.sigma_alpha_0[a].real();
    y[coherence_im(a)] = s.sigma_alpha_0[a].imag();
  }
  return y;
}

TracedState FlatLayout::unpack(std::span<const double> y) const {
  TracedState s = TracedState::flat_initial(levels);
  s.sigma00 = y[dot()];
  s.sink = y[sink()];
  for (std::size_t a = 0; a < levels; ++a) {
    s.sigma_alpha_alpha[a] = y[population(a)];
    s.sigma_alpha_0[a] = {y[coherence_re(a)], y[coherence_im(a)]};
  }
  return s;
}

std::vector<double> CavityLayout::pack(const TracedState& s) const {
  if (!s.sigma11 || s.sigma_alpha_alpha.size() != levels || s.sigma_0alpha.size() != levels ||
      s.sigma_1alpha.size() != levels) {
    throw InvariantViolation("cavity state does not match layout");
  }
  std::vector<double> y(dimension());
  y[dot()] = s.sigma00;
  y[cavity()] = *s.sigma11;
  y[sink()] = s.sink;
  y[dot_cavity_re()] = s.sigma01.real();
  y[dot_cavity_im()] = s.sigma01.imag();
  for (std::size_t a = 0; a < levels; ++a) {
    y[population(a)] = s.sigma_alpha_alpha[a];
    y[dot_level_re(a)] = s.sigma_0alpha[a].real();
    y[dot_level_im(a)] = s.sigma_0alpha[a].imag();
    y[cavity_level_re(a)] = s.sigma_1alpha[a].real();
    y[cavity_level_im(a)] = s.sigma_1alpha[a].imag();
  }
  return y;
}

TracedState CavityLayout::unpack(std::span<const double> y) const {
  TracedState s = TracedState::cavity_initial(levels);
  s.sigma00 = y[dot()];
  s.sigma11 = y[cavity()];
  s.sink = y[sink()];
  s.sigma01 = {y[dot_cavity_re()], y[dot_cavity_im()]};
  for (std::size_t a = 0; a < levels; ++a) {
    s.sigma_alpha_alpha[a] = y[population(a)];
    s.sigma_0alpha[a] = {y[dot_level_re(a)], y[dot_level_im(a)]};
    s.sigma_1alpha[a] = {y[cavity_level_re(a)], y[cavity_level_im(a)]};
  }
  return s;
}

std::vector<double> CountResolvedLayout::pack(const CountResolvedState& s) const {
  if (s.n_max != n_max || s.blocks.size() != n_max + 1) {
    throw InvariantViolation("count-resolved state does not match layout");
  }
  std::vector<double> y(dimension());
  const FlatLayout block = block_layout();
  for (std::size_t n = 0; n <= n_max; ++n) {
    const auto packed = block.pack(s.blocks[n]);
    std::copy(packed.begin(), packed.end(), y.begin() + static_cast<std::ptrdiff_t>(block_offset(n)));
  }
  y[overflow()] = s.overflow;
  return y;
}

CountResolvedState CountResolvedLayout::unpack(std::span<const double> y) const {
  CountResolvedState s;
  s.n_max = n_max;
  s.blocks.reserve(n_max + 1);
  const FlatLayout block = block_layout();
  for (std::size_t n = 0; n <= n_max; ++n) {
    s.blocks.push_back(block.unpack(y.subspan(block_offset(n), block_size())));
  }
  s.overflow = y[overflow()];
  return s;
}

}  // namespace zenosim
