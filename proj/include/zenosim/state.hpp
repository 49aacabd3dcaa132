#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zenosim/params.hpp"

namespace zenosim {

using Complex = std::complex<double>;

/// Discretised reservoir: level energies, per-level couplings and quadrature
/// weights (level spacing). The local density of states is 1/weight.
struct ContinuumGrid {
  std::vector<double> energies;
  std::vector<double> couplings;
  std::vector<double> weights;

  std::size_t size() const noexcept { return energies.size(); }
  bool empty() const noexcept { return energies.empty(); }

  /// 2*pi*rho*Omega^2 at level i.
  double width_at(std::size_t i) const;

  /// Throws InvalidGrid unless the lists have equal length, energies strictly
  /// increase and weights are positive.
  void check() const;
};

/// Density matrix of the measured electron with the detector traced out.
///
/// Flat-continuum scenarios populate sigma_alpha_0 (sigma_{alpha 0}); cavity
/// scenarios populate sigma11, sigma01, sigma_0alpha and sigma_1alpha. Only one
/// triangle is stored: sigma_{0 alpha} = conj(sigma_{alpha 0}) and so on.
///
/// `sink` holds the probability that has left the explicitly resolved levels
/// (the part of the continuum outside a finite grid). resolved_trace() + sink
/// is conserved by every generator in the library.
struct TracedState {
  double sigma00 = 1.0;
  std::optional<double> sigma11;
  double sink = 0.0;
  std::vector<double> sigma_alpha_alpha;
  std::vector<Complex> sigma_alpha_0;
  Complex sigma01{};
  std::vector<Complex> sigma_0alpha;
  std::vector<Complex> sigma_1alpha;

  bool is_cavity() const noexcept { return sigma11.has_value(); }
  double continuum_population() const;
  double resolved_trace() const;
  double trace() const { return resolved_trace() + sink; }

  /// Diagonal elements in [-eps, 1 + eps] and |trace - 1| <= eps.
  void check(double eps_trace = kDefaultTraceTolerance) const;

  static TracedState flat_initial(std::size_t n_levels);
  static TracedState cavity_initial(std::size_t n_levels);
};

/// Detector-count resolved density matrix: one TracedState-shaped block per
/// count n in [0, n_max]. `overflow` is the probability that moved past n_max.
struct CountResolvedState {
  std::size_t n_max = 0;
  std::vector<TracedState> blocks;
  double overflow = 0.0;

  double total_trace() const;
  double leak() const noexcept { return overflow; }
  /// Sum over n of every block (the reduced state of the measured electron).
  TracedState traced() const;
  /// P_n = trace of block n.
  std::vector<double> count_marginal() const;
  double mean_count() const;

  /// Total trace within eps_trace of 1 - overflow, and overflow <= eps_trunc.
  void check(double eps_trace = kDefaultTraceTolerance,
             double eps_trunc = kDefaultTruncationTolerance) const;
};

/// Throws InvariantViolation unless times start at 0 and strictly increase.
void check_time_grid(std::span<const double> times);

[[noreturn]] void throw_trajectory_mismatch(const std::string& what, std::size_t got, std::size_t expected);

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::map<std::string, std::vector<double>> observables;

  std::size_t size() const noexcept { return times.size(); }
  const State& back() const { return states.back(); }

  /// Throws InvariantViolation unless times start at 0, strictly increase and
  /// match states (and every observable) in length.
  void check() const;
};

template <class State>
void Trajectory<State>::check() const {
  check_time_grid(times);
  if (states.size() != times.size()) {
    throw_trajectory_mismatch("states", states.size(), times.size());
  }
  for (const auto& [name, series] : observables) {
    if (series.size() != times.size()) throw_trajectory_mismatch(name, series.size(), times.size());
  }
}

// Packed layouts shared by generators and tests.
//
// Flat continuum, N levels (dimension 2 + 3N):
//   [sigma00, sigma_aa x N, sink, (Re, Im) sigma_{a0} x N]
// Cavity, N reservoir levels (dimension 5 + 5N):
//   [sigma00, sigma11, sigma_aa x N, sink, Re sigma01, Im sigma01,
//    (Re, Im) sigma_{0a} x N, (Re, Im) sigma_{1a} x N]
// Count resolved: blocks n = 0..n_max, each in the flat layout, then one
// overflow slot.

struct FlatLayout {
  std::size_t levels = 0;

  std::size_t dimension() const noexcept { return 2 + 3 * levels; }
  static constexpr std::size_t dot() noexcept { return 0; }
  std::size_t population(std::size_t a) const noexcept { return 1 + a; }
  std::size_t sink() const noexcept { return 1 + levels; }
  std::size_t coherence_re(std::size_t a) const noexcept { return 2 + levels + 2 * a; }
  std::size_t coherence_im(std::size_t a) const noexcept { return 3 + levels + 2 * a; }

  std::vector<double> pack(const TracedState& s) const;
  TracedState unpack(std::span<const double> y) const;
};

struct CavityLayout {
  std::size_t levels = 0;

  std::size_t dimension() const noexcept { return 5 + 5 * levels; }
  static constexpr std::size_t dot() noexcept { return 0; }
  static constexpr std::size_t cavity() noexcept { return 1; }
  std::size_t population(std::size_t a) const noexcept { return 2 + a; }
  std::size_t sink() const noexcept { return 2 + levels; }
  std::size_t dot_cavity_re() const noexcept { return 3 + levels; }
  std::size_t dot_cavity_im() const noexcept { return 4 + levels; }
  std::size_t dot_level_re(std::size_t a) const noexcept { return 5 + levels + 2 * a; }
  std::size_t dot_level_im(std::size_t a) const noexcept { return 6 + levels + 2 * a; }
  std::size_t cavity_level_re(std::size_t a) const noexcept { return 5 + 3 * levels + 2 * a; }
  std::size_t cavity_level_im(std::size_t a) const noexcept { return 6 + 3 * levels + 2 * a; }

  std::vector<double> pack(const TracedState& s) const;
  TracedState unpack(std::span<const double> y) const;
};

struct CountResolvedLayout {
  std::size_t levels = 0;
  std::size_t n_max = 0;

  FlatLayout block_layout() const noexcept { return {levels}; }
  std::size_t block_size() const noexcept { return block_layout().dimension(); }
  std::size_t block_offset(std::size_t n) const noexcept { return n * block_size(); }
  std::size_t overflow() const noexcept { return (n_max + 1) * block_size(); }
  std::size_t dimension() const noexcept { return overflow() + 1; }

  std::vector<double> pack(const CountResolvedState& s) const;
  CountResolvedState unpack(std::span<const double> y) const;
};

}  // namespace zenosim
