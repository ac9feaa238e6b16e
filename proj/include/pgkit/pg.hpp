#pragma once

#include <cstddef>

#include "pgkit/conjugate.hpp"
#include "pgkit/model.hpp"
#include "pgkit/rng.hpp"
#include "pgkit/smc.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

struct PgRunOptions {
    bool infer_theta = true;    // false keeps init_theta for every iteration
    std::size_t state_thin = 1; // keep every k-th path; 0 keeps none
    SmcOptions smc{};
};

// Convenience initializer: one bootstrap sweep at theta, retained draw.
Trajectory make_initial_path(const SsmModel& model, const NoiseParams& theta,
                             const ObservationSeries& obs, std::size_t N,
                             RngStream& rng, const SmcOptions& opts = {});

// Particle Gibbs: alternate conjugate (Q, R) draws with a conditional SMC
// state update. Iteration 1 records the initialization; M >= 1.
Trace pg_run(const SsmModel& model, const ObservationSeries& obs,
             const InvGammaPrior& prior, std::size_t N, std::size_t M,
             const Trajectory& init_path, const NoiseParams& init_theta,
             RngStream& rng, const PgRunOptions& opts = {});

// PG with ancestor sampling in the state update. With ancestor_sampling set
// to false this reproduces pg_run draw for draw under the same stream.
Trace pgas_run(const SsmModel& model, const ObservationSeries& obs,
               const InvGammaPrior& prior, std::size_t N, std::size_t M,
               const Trajectory& init_path, const NoiseParams& init_theta,
               RngStream& rng, bool ancestor_sampling = true,
               const PgRunOptions& opts = {});

}  // namespace pgkit
