#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pgkit/conjugate.hpp"
#include "pgkit/model.hpp"
#include "pgkit/particle_system.hpp"
#include "pgkit/rng.hpp"
#include "pgkit/smc.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

struct IpmcmcOptions {
    std::size_t state_thin = 1;   // snapshot cadence for retained paths; 0 keeps none
    std::size_t num_threads = 1;  // worker count for the per-iteration node sweeps
    SmcOptions smc{};
};

// Worker-pool bookkeeping: R nodes of which P are conditional at any time.
struct NodePool {
    std::size_t num_nodes = 0;                 // R
    std::size_t num_conditional = 0;           // P
    std::vector<std::size_t> conditional_ids;  // one distinct node index per chain

    void validate() const;
};

// Output of an interacting pool run: P retained chains.
struct IpmcmcTrace {
    std::vector<double> q;
    std::vector<double> r;
    std::vector<std::vector<Trajectory>> states;      // snapshot -> P retained paths
    std::vector<std::size_t> state_iters;             // 1-based iteration per snapshot
    std::vector<std::vector<std::size_t>> chain_ids;  // iteration -> node id per chain
    std::vector<std::uint8_t> swapped;                // 1 when any chain changed node
    std::size_t num_nodes = 0;
    std::size_t num_conditional = 0;
    TraceMeta meta;

    std::size_t iterations() const noexcept { return q.size(); }
};

// log Zhat of one completed sweep.
double node_zhat(const ParticleSystem& system);

// Redraws the chain-to-node assignment one chain at a time: chain j picks
// node r with probability proportional to Zhat_r among the nodes not claimed
// by the other chains (its own current node stays admissible). The result is
// again pairwise distinct. Throws when every admissible Zhat is zero.
std::vector<std::size_t> resample_conditional_ids(const std::vector<double>& log_zhats,
                                                  std::vector<std::size_t> ids,
                                                  RngStream& rng);

// Interacting PMCMC: per iteration the P conditional nodes run csmc against
// the retained chains while the other R - P nodes run fresh bootstrap
// sweeps; assignments are then redrawn by marginal-likelihood estimate and
// each chain adopts the path drawn from its (possibly new) node. Node sweeps
// use substream (iteration, node) and the assignment draw uses substream
// (iteration, R), so output is identical for any num_threads.
//
// theta handling: fixed mode runs the whole pool at the given (Q, R). Infer
// mode is an extension that adds one shared conjugate draw per iteration,
// conditioned on the first retained chain.
IpmcmcTrace ipmcmc_run(const SsmModel& model, const ObservationSeries& obs,
                       const ThetaSpec& theta, const InvGammaPrior& prior,
                       std::size_t N, std::size_t M, std::size_t R, std::size_t P,
                       const std::vector<Trajectory>& init_paths, RngStream& rng,
                       const IpmcmcOptions& opts = {});

}  // namespace pgkit
