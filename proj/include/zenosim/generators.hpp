#pragma once

#include <cstddef>
#include <memory>

#include "zenosim/integrator.hpp"
#include "zenosim/params.hpp"
#include "zenosim/state.hpp"

namespace zenosim {

// Right-hand sides used by the evolve_* functions, exposed for inspection.
// Generators built on a grid keep a reference to it; the grid must outlive them.

/// dP_n/dt = -D P_n + D P_{n-1} on n_max + 1 sectors plus the overflow slot.
std::unique_ptr<LinearGenerator> make_counting_generator(double rate, std::size_t n_max);

/// Flat-continuum Bloch equations in FlatLayout.
std::unique_ptr<LinearGenerator> make_bloch_generator(const ModelParams& params, const ContinuumGrid& grid,
                                                      double gamma_d);

/// Count-resolved equations in CountResolvedLayout.
std::unique_ptr<LinearGenerator> make_count_resolved_generator(const ModelParams& params,
                                                               const ContinuumGrid& grid, std::size_t n_max);

/// Schroedinger amplitudes (re, im) of b0 then b_alpha, in the frame rotating at e0.
std::unique_ptr<LinearGenerator> make_amplitude_generator(const ModelParams& params, const ContinuumGrid& grid);

/// Dot-cavity-reservoir equations in CavityLayout.
std::unique_ptr<LinearGenerator> make_cavity_generator(const ModelParams& params, const ContinuumGrid& grid,
                                                       double gamma_d);

}  // namespace zenosim
