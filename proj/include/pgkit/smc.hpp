#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgkit/model.hpp"
#include "pgkit/particle_system.hpp"
#include "pgkit/rng.hpp"

namespace pgkit {

enum class Resampling { multinomial, systematic };

struct SmcOptions {
    Resampling resampling = Resampling::multinomial;
};

struct FilterResult {
    ParticleSystem system;
    SweepResult draw;
    std::vector<double> filtered_means;
};

// Bootstrap particle filter: propose from the transition, weight by the
// observation density, resample every step. N >= 1.
FilterResult bootstrap_pf(const SsmModel& model, const NoiseParams& params,
                          const ObservationSeries& obs, std::size_t N,
                          RngStream& rng, const SmcOptions& opts = {});

// Conditional SMC: the last particle index is pinned to the reference path
// and survives every resampling step. N >= 2. out_system, when given,
// receives the full sweep record.
SweepResult csmc(const SsmModel& model, const NoiseParams& params,
                 const ObservationSeries& obs, const Trajectory& reference,
                 std::size_t N, RngStream& rng, const SmcOptions& opts = {},
                 ParticleSystem* out_system = nullptr);

// Conditional SMC with ancestor sampling: the pinned particle's ancestor is
// redrawn each step from ancestor_weights instead of staying on itself.
SweepResult csmc_as(const SsmModel& model, const NoiseParams& params,
                    const ObservationSeries& obs, const Trajectory& reference,
                    std::size_t N, RngStream& rng, const SmcOptions& opts = {},
                    ParticleSystem* out_system = nullptr);

// Normalized probabilities prop. to w_prev[i] * N(reference_next; f(x_i, t_prev), Q).
// t_prev is the 1-based time of the previous-step particles.
std::vector<double> ancestor_weights(const SsmModel& model, const NoiseParams& params,
                                     std::span<const double> log_w_prev,
                                     std::span<const double> particles_prev,
                                     double reference_next, long t_prev);

}  // namespace pgkit
