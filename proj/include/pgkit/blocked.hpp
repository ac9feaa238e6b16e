#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pgkit/conjugate.hpp"
#include "pgkit/model.hpp"
#include "pgkit/particle_system.hpp"
#include "pgkit/rng.hpp"
#include "pgkit/smc.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

// Inclusive index range [first, last] into a length-T path (0-based).
struct Block {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t length() const noexcept { return last - first + 1; }
};

struct BlockPartition {
    std::vector<Block> blocks;
    std::size_t block_len = 0;  // L
    std::size_t overlap = 0;    // p
};

// Neighboring state values a block conditions on; absent at sequence ends.
struct BlockBoundary {
    std::optional<double> initial_state;   // x at first - 1
    std::optional<double> terminal_state;  // x at last + 1
};

// Overlapping cover of [0, T): the first block starts at 0, each following
// block starts p indices before the previous end, the final block is clipped
// at T - 1. Consecutive blocks share exactly p indices; blocks further apart
// are disjoint. Requires 2 <= L <= T and p < L/2.
BlockPartition make_blocks(std::size_t T, std::size_t L, std::size_t p);

// Conditional SMC restricted to one block. Free particles start from
// p(x_first | initial_state), or from the model initial law when the block
// opens the sequence; when terminal_state is present the final weights pick
// up the transition density into it before the path draw, so the selection
// respects the fixed right boundary. obs and reference span the full series;
// the returned sampled_path covers only the block. A block spanning the whole
// series with no boundaries reproduces plain csmc draw for draw.
SweepResult blocked_csmc(const SsmModel& model, const NoiseParams& params,
                         const ObservationSeries& obs, const Trajectory& reference,
                         const Block& block, const BlockBoundary& boundary,
                         std::size_t N, RngStream& rng, const SmcOptions& opts = {},
                         ParticleSystem* out_system = nullptr);

struct BlockedPgOptions {
    std::size_t state_thin = 1;   // snapshot cadence; 0 keeps none
    std::size_t num_threads = 1;  // workers per parity pass
    SmcOptions smc{};
};

// Blocked particle Gibbs. Iteration 1 draws the initial path with one
// bootstrap sweep; each later iteration refreshes odd-position blocks in
// parallel, then even-position blocks in parallel. Every block run reads its
// reference and boundary values from the live path, so the even pass
// conditions on the odd pass's output and overlap indices are owned by the
// even-position block. Per-block substream (iteration, block index) makes the
// output independent of thread count. theta handling matches ipmcmc_run:
// fixed by default, optional conjugate draw per iteration in infer mode.
Trace blocked_pg_run(const SsmModel& model, const ObservationSeries& obs,
                     const ThetaSpec& theta, const InvGammaPrior& prior,
                     std::size_t N, std::size_t M, std::size_t L, std::size_t p,
                     RngStream& rng, const BlockedPgOptions& opts = {});

}  // namespace pgkit
