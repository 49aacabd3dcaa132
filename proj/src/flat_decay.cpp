#include "zenosim/flat_decay.hpp"

#include <cmath>
#include <sstream>

#include "zenosim/continuum.hpp"
#include "zenosim/detector.hpp"
#include "zenosim/errors.hpp"
#include "zenosim/generators.hpp"

namespace zenosim {

namespace {

void require_rate(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidParams(std::string(name) + " must be nonnegative");
}

/// The grid must carry the flat width gamma0 at every level.
void require_flat_grid(const ContinuumGrid& grid, double gamma0) {
  grid.check();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double width = grid.width_at(a);
    if (std::abs(width - gamma0) > 1e-9 * std::max(1.0, gamma0)) {
      std::ostringstream msg;
      msg << "grid level " << a << " reconstructs width " << width << " but gamma0 = " << gamma0;
      throw InvalidGrid(msg.str());
    }
  }
}

// sigma00' = -G0 sigma00
// sigma_aa' = -2 W_a Im sigma_a0
// sigma_a0' = i(E0 - E_a) sigma_a0 - i W_a sigma00 - (G0 + Gd)/2 sigma_a0
// sink' = G0 sigma00 + 2 sum_a W_a Im sigma_a0
class BlochGenerator final : public LinearGenerator {
 public:
  BlochGenerator(const ModelParams& p, const ContinuumGrid& grid, double gamma_d)
      : layout_{grid.size()}, gamma0_(p.gamma0), damping_((p.gamma0 + gamma_d) / 2.0), grid_(grid), e0_(p.e0) {}

  std::size_t dimension() const override { return layout_.dimension(); }

  void apply(std::span<const double> y, std::span<double> dydt) const override {
    const double dot = y[FlatLayout::dot()];
    double escaped = 0.0;
    for (std::size_t a = 0; a < layout_.levels; ++a) {
      const double w = grid_.couplings[a];
      const double detuning = e0_ - grid_.energies[a];
      const double re = y[layout_.coherence_re(a)];
      const double im = y[layout_.coherence_im(a)];
      dydt[layout_.coherence_re(a)] = -detuning * im - damping_ * re;
      dydt[layout_.coherence_im(a)] = detuning * re - w * dot - damping_ * im;
      dydt[layout_.population(a)] = -2.0 * w * im;
      escaped += 2.0 * w * im;
    }
    dydt[FlatLayout::dot()] = -gamma0_ * dot;
    dydt[layout_.sink()] = gamma0_ * dot + escaped;
  }

 private:
  FlatLayout layout_;
  double gamma0_;
  double damping_;
  const ContinuumGrid& grid_;
  double e0_;
};

// Count-resolved version: the detector moves block n to n+1 at rate D' while the
// dot is occupied and D otherwise; dot-continuum coherences lose (D + D')/2 and
// gain sqrt(D D') from block n-1. Outflow from n_max goes to the overflow slot.
class CountResolvedGenerator final : public LinearGenerator {
 public:
  CountResolvedGenerator(const ModelParams& p, const ContinuumGrid& grid, std::size_t n_max)
      : layout_{grid.size(), n_max}, grid_(grid), gamma0_(p.gamma0), e0_(p.e0) {
    const DetectorRates r = derived_rates(p);
    d_ = r.d;
    d_prime_ = r.d_prime;
    cross_ = std::sqrt(r.d * r.d_prime);
  }

  std::size_t dimension() const override { return layout_.dimension(); }

  void apply(std::span<const double> y, std::span<double> dydt) const override {
    const FlatLayout b = layout_.block_layout();
    const std::size_t levels = b.levels;
    const double coherence_damping = (gamma0_ + d_ + d_prime_) / 2.0;
    for (std::size_t n = 0; n <= layout_.n_max; ++n) {
      const auto cur = y.subspan(layout_.block_offset(n), layout_.block_size());
      const auto out = dydt.subspan(layout_.block_offset(n), layout_.block_size());
      const bool has_prev = n > 0;
      const auto prev = has_prev ? y.subspan(layout_.block_offset(n - 1), layout_.block_size()) : cur;
      const double feed = has_prev ? 1.0 : 0.0;

      const double dot = cur[FlatLayout::dot()];
      double escaped = 0.0;
      for (std::size_t a = 0; a < levels; ++a) {
        const double w = grid_.couplings[a];
        const double detuning = e0_ - grid_.energies[a];
        const double re = cur[b.coherence_re(a)];
        const double im = cur[b.coherence_im(a)];
        out[b.coherence_re(a)] = -detuning * im - coherence_damping * re + feed * cross_ * prev[b.coherence_re(a)];
        out[b.coherence_im(a)] =
            detuning * re - w * dot - coherence_damping * im + feed * cross_ * prev[b.coherence_im(a)];
        out[b.population(a)] = -d_ * cur[b.population(a)] + feed * d_ * prev[b.population(a)] - 2.0 * w * im;
        escaped += 2.0 * w * im;
      }
      out[FlatLayout::dot()] = -(gamma0_ + d_prime_) * dot + feed * d_prime_ * prev[FlatLayout::dot()];
      out[b.sink()] = -d_ * cur[b.sink()] + feed * d_ * prev[b.sink()] + gamma0_ * dot + escaped;
    }

    const auto top = y.subspan(layout_.block_offset(layout_.n_max), layout_.block_size());
    double empty_dot = top[b.sink()];
    for (std::size_t a = 0; a < levels; ++a) empty_dot += top[b.population(a)];
    dydt[layout_.overflow()] = d_prime_ * top[FlatLayout::dot()] + d_ * empty_dot;
  }

  const CountResolvedLayout& layout() const { return layout_; }

 private:
  CountResolvedLayout layout_;
  const ContinuumGrid& grid_;
  double gamma0_;
  double e0_;
  double d_ = 0.0;
  double d_prime_ = 0.0;
  double cross_ = 0.0;
};

// d/dt of the mean count: sum_n n d/dt trace(block n).
double mean_count_rate(const CountResolvedGenerator& gen, std::span<const double> y, StateVector& buffer) {
  const CountResolvedLayout& layout = gen.layout();
  const FlatLayout b = layout.block_layout();
  buffer.resize(gen.dimension());
  gen.apply(y, buffer);
  double dn = 0.0;
  for (std::size_t n = 1; n <= layout.n_max; ++n) {
    const auto block = std::span<const double>(buffer).subspan(layout.block_offset(n), layout.block_size());
    double d_trace = block[FlatLayout::dot()] + block[b.sink()];
    for (std::size_t a = 0; a < b.levels; ++a) d_trace += block[b.population(a)];
    dn += static_cast<double>(n) * d_trace;
  }
  return dn;
}

// Amplitudes in the frame rotating at E0, packed as (Re, Im) pairs: b0 first,
// then b_a in grid order.
class AmplitudeGenerator final : public LinearGenerator {
 public:
  AmplitudeGenerator(const ModelParams& p, const ContinuumGrid& grid) : grid_(grid), e0_(p.e0) {}

  std::size_t dimension() const override { return 2 * (grid_.size() + 1); }

  void apply(std::span<const double> y, std::span<double> dydt) const override {
    const double x0 = y[0];
    const double y0 = y[1];
    double sum_re = 0.0;
    double sum_im = 0.0;
    for (std::size_t a = 0; a < grid_.size(); ++a) {
      const double w = grid_.couplings[a];
      const double e = grid_.energies[a] - e0_;
      const double xa = y[2 + 2 * a];
      const double ya = y[3 + 2 * a];
      // b_a' = -i e b_a - i w b0
      dydt[2 + 2 * a] = e * ya + w * y0;
      dydt[3 + 2 * a] = -e * xa - w * x0;
      sum_re += w * xa;
      sum_im += w * ya;
    }
    // b0' = -i sum_a w b_a
    dydt[0] = sum_im;
    dydt[1] = -sum_re;
  }

 private:
  const ContinuumGrid& grid_;
  double e0_;
};

}  // namespace

std::unique_ptr<LinearGenerator> make_bloch_generator(const ModelParams& params, const ContinuumGrid& grid,
                                                      double gamma_d) {
  return std::make_unique<BlochGenerator>(params, grid, gamma_d);
}

std::unique_ptr<LinearGenerator> make_count_resolved_generator(const ModelParams& params,
                                                               const ContinuumGrid& grid, std::size_t n_max) {
  return std::make_unique<CountResolvedGenerator>(params, grid, n_max);
}

std::unique_ptr<LinearGenerator> make_amplitude_generator(const ModelParams& params, const ContinuumGrid& grid) {
  return std::make_unique<AmplitudeGenerator>(params, grid);
}

double LineShape::integral(std::span<const double> weights) const {
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    double w = 0.0;
    if (!weights.empty()) {
      w = weights[i];
    } else if (energies.size() > 1) {
      w = energies[1] - energies[0];
    }
    s += density[i] * w;
  }
  return s;
}

Trajectory<TracedState> evolve_bloch(const ModelParams& params, const ContinuumGrid& grid, double gamma_d,
                                     std::span<const double> times, const IntegrationControl& ctl,
                                     double eps_trace) {
  validate_params(params);
  require_rate(gamma_d, "gamma_d");
  require_flat_grid(grid, params.gamma0);

  const BlochGenerator gen(params, grid, gamma_d);
  const FlatLayout layout{grid.size()};
  const auto raw = integrate(gen, layout.pack(TracedState::flat_initial(grid.size())), times, ctl);

  Trajectory<TracedState> out;
  out.times = raw.times;
  auto& survival = out.observables["survival"];
  auto& continuum = out.observables["continuum"];
  auto& sink = out.observables["sink"];
  for (const auto& y : raw.states) {
    TracedState s = layout.unpack(y);
    s.check(eps_trace);
    survival.push_back(s.sigma00);
    continuum.push_back(s.continuum_population());
    sink.push_back(s.sink);
    out.states.push_back(std::move(s));
  }
  out.check();
  return out;
}

double survival_analytic(double gamma0, double t) {
  require_rate(gamma0, "gamma0");
  if (!(t >= 0.0)) throw InvalidParams("t must be nonnegative");
  return std::exp(-gamma0 * t);
}

double occupation_alpha_analytic(double gamma0, double e0, double coupling, double e_alpha, double t) {
  const double detuning = e_alpha - e0;
  const double prefactor = coupling * coupling / (detuning * detuning + gamma0 * gamma0 / 4.0);
  return prefactor * (1.0 - 2.0 * std::cos(detuning * t) * std::exp(-gamma0 * t / 2.0) + std::exp(-gamma0 * t));
}

LineShape line_shape(double gamma0, double gamma_d, double e0, std::span<const double> energies) {
  if (!(gamma0 > 0.0)) throw InvalidParams("line shape needs gamma0 > 0");
  require_rate(gamma_d, "gamma_d");
  const double width = gamma0 + gamma_d;
  LineShape ls;
  ls.energies.assign(energies.begin(), energies.end());
  ls.density.reserve(energies.size());
  for (double e : energies) ls.density.push_back(lorentzian_density(e, e0, width));
  ls.peak_energy = e0;
  ls.fwhm = width;
  return ls;
}

LineShape measure_line_shape(const TracedState& state, const ContinuumGrid& grid) {
  grid.check();
  if (state.sigma_alpha_alpha.size() != grid.size()) throw InvalidGrid("state and grid sizes differ");
  const double total = state.continuum_population();
  if (!(total > 0.0)) throw FitFailure("continuum is empty; no line shape to measure");
  LineShape ls;
  ls.energies = grid.energies;
  ls.density.resize(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    ls.density[a] = state.sigma_alpha_alpha[a] / grid.weights[a] / total;
  }
  const HalfMaximum h = half_maximum(ls.energies, ls.density);
  ls.peak_energy = h.peak_position;
  ls.fwhm = h.fwhm;
  return ls;
}

Trajectory<CountResolvedState> evolve_n_resolved(const ModelParams& params, const ContinuumGrid& grid,
                                                 std::span<const double> times, std::optional<std::size_t> n_max,
                                                 const IntegrationControl& ctl, double eps_trace, double eps_trunc) {
  validate_params(params);
  require_flat_grid(grid, params.gamma0);
  check_time_grid(times);
  const DetectorRates rates = derived_rates(params);
  const std::size_t cutoff = n_max.value_or(auto_count_cutoff(rates.d * times.back()));

  const CountResolvedGenerator gen(params, grid, cutoff);
  const CountResolvedLayout& layout = gen.layout();
  CountResolvedState initial;
  initial.n_max = cutoff;
  initial.blocks.assign(cutoff + 1, TracedState::flat_initial(grid.size()));
  for (std::size_t n = 1; n <= cutoff; ++n) initial.blocks[n].sigma00 = 0.0;

  const auto raw = integrate(gen, layout.pack(initial), times, ctl);

  Trajectory<CountResolvedState> out;
  out.times = raw.times;
  auto& survival = out.observables["survival"];
  auto& mean_count = out.observables["mean_count"];
  auto& current = out.observables["current"];
  auto& leak = out.observables["leak"];
  StateVector rate;
  for (const auto& y : raw.states) {
    CountResolvedState s = layout.unpack(y);
    s.check(eps_trace, eps_trunc);
    const double dn = mean_count_rate(gen, y, rate);
    double dot = 0.0;
    for (const auto& b : s.blocks) dot += b.sigma00;
    survival.push_back(dot);
    mean_count.push_back(s.mean_count());
    current.push_back(dn);
    leak.push_back(s.overflow);
    out.states.push_back(std::move(s));
  }
  out.check();
  return out;
}

double detector_current(double d, double d_prime, double sigma00) {
  if (!(sigma00 >= 0.0 && sigma00 <= 1.0)) throw InvalidParams("sigma00 must lie in [0, 1]");
  return d_prime * sigma00 + d * (1.0 - sigma00);
}

double count_rate(const ModelParams& params, const ContinuumGrid& grid, const CountResolvedState& state) {
  validate_params(params);
  require_flat_grid(grid, params.gamma0);
  const CountResolvedGenerator gen(params, grid, state.n_max);
  StateVector buffer;
  return mean_count_rate(gen, gen.layout().pack(state), buffer);
}

double AmplitudeState::norm() const {
  double s = std::norm(b0);
  for (const auto& b : b_alpha) s += std::norm(b);
  return s;
}

Trajectory<AmplitudeState> evolve_amplitudes_qd(const ModelParams& params, const ContinuumGrid& grid,
                                                std::span<const double> times, const IntegrationControl& ctl) {
  validate_params(params);
  if (params.delta_omega != 0.0) {
    throw InvalidParams("the amplitude oracle covers the unmeasured electron only (delta_omega must be 0)");
  }
  grid.check();
  const AmplitudeGenerator gen(params, grid);
  StateVector y0(gen.dimension(), 0.0);
  y0[0] = 1.0;
  const auto raw = integrate(gen, std::move(y0), times, ctl);

  Trajectory<AmplitudeState> out;
  out.times = raw.times;
  auto& survival = out.observables["survival"];
  auto& norm = out.observables["norm"];
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto& y = raw.states[k];
    const Complex phase = std::polar(1.0, -params.e0 * raw.times[k]);
    AmplitudeState s;
    s.b0 = phase * Complex{y[0], y[1]};
    s.b_alpha.resize(grid.size());
    for (std::size_t a = 0; a < grid.size(); ++a) s.b_alpha[a] = phase * Complex{y[2 + 2 * a], y[3 + 2 * a]};
    survival.push_back(s.survival());
    norm.push_back(s.norm());
    out.states.push_back(std::move(s));
  }
  out.check();
  return out;
}

namespace {

double projection_factor(double a, double dt) {
  if (!(a >= 0.0) || !(dt > 0.0)) throw InvalidStep("repeated projection needs a >= 0 and dt > 0");
  const double loss = a * dt * dt;
  if (!(loss < 1.0)) throw InvalidStep("a dt^2 must be below 1");
  return 1.0 - loss;
}

}  // namespace

double repeated_projection_survival(double a, double dt, std::size_t n) {
  return std::pow(projection_factor(a, dt), static_cast<double>(n));
}

double repeated_projection_at_time(double a, double dt, double t) {
  if (!(t >= 0.0)) throw InvalidStep("t must be nonnegative");
  return std::pow(projection_factor(a, dt), t / dt);
}

double repeated_projection_first_order(double a, double dt, double t) {
  projection_factor(a, dt);
  return 1.0 - a * dt * t;
}

ExponentialFit measured_decay_rate(const Trajectory<TracedState>& traj, double gamma0) {
  if (!(gamma0 > 0.0)) throw InvalidParams("decay-rate fit needs gamma0 > 0");
  const auto it = traj.observables.find("survival");
  if (it == traj.observables.end()) throw FitFailure("trajectory has no survival series");
  return fit_exponential(traj.times, it->second, 1.0 / gamma0, 5.0 / gamma0);
}

}  // namespace zenosim
