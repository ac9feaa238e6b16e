#include "pgkit/ipmcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "pgkit/errors.hpp"
#include "pgkit/parallel.hpp"

namespace pgkit {

namespace {
constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
}

void NodePool::validate() const {
    if (num_conditional < 1 || num_conditional > num_nodes)
        throw Error("ipmcmc", "need 1 <= P <= R conditional nodes");
    if (conditional_ids.size() != num_conditional)
        throw Error("ipmcmc", "conditional id count does not match P");
    for (std::size_t j = 0; j < conditional_ids.size(); ++j) {
        if (conditional_ids[j] >= num_nodes)
            throw Error("ipmcmc", "conditional id out of range");
        for (std::size_t k = j + 1; k < conditional_ids.size(); ++k)
            if (conditional_ids[j] == conditional_ids[k])
                throw Error("ipmcmc", "conditional ids must be distinct");
    }
}

double node_zhat(const ParticleSystem& system) { return system.log_marginal(); }

std::vector<std::size_t> resample_conditional_ids(const std::vector<double>& log_zhats,
                                                  std::vector<std::size_t> ids,
                                                  RngStream& rng) {
    const std::size_t R = log_zhats.size();
    NodePool pool{R, ids.size(), ids};
    pool.validate();
    for (double lz : log_zhats)
        if (std::isnan(lz) || lz == std::numeric_limits<double>::infinity())
            throw Error("ipmcmc", "log Zhat must not be NaN or +inf");

    std::vector<std::uint8_t> claimed(R, 0);
    for (std::size_t id : ids) claimed[id] = 1;
    std::vector<double> w(R);

    for (std::size_t j = 0; j < ids.size(); ++j) {
        claimed[ids[j]] = 0;  // chain j releases its node while redrawing
        double max_lz = -std::numeric_limits<double>::infinity();
        for (std::size_t node = 0; node < R; ++node)
            if (!claimed[node]) max_lz = std::max(max_lz, log_zhats[node]);
        if (max_lz == -std::numeric_limits<double>::infinity())
            throw Error("ipmcmc", "every admissible node has zero marginal-likelihood estimate");
        double total = 0.0;
        for (std::size_t node = 0; node < R; ++node) {
            w[node] = claimed[node] ? 0.0 : std::exp(log_zhats[node] - max_lz);
            total += w[node];
        }
        const double u = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = kUnassigned;
        for (std::size_t node = 0; node < R; ++node) {
            acc += w[node];
            if (u < acc) {
                pick = node;
                break;
            }
        }
        if (pick == kUnassigned) {
            // u landed on the rounding tail; take the last admissible node.
            for (std::size_t node = R; node-- > 0;)
                if (!claimed[node] && w[node] > 0.0) {
                    pick = node;
                    break;
                }
        }
        ids[j] = pick;
        claimed[pick] = 1;
    }
    return ids;
}

IpmcmcTrace ipmcmc_run(const SsmModel& model, const ObservationSeries& obs,
                       const ThetaSpec& theta, const InvGammaPrior& prior,
                       std::size_t N, std::size_t M, std::size_t R, std::size_t P,
                       const std::vector<Trajectory>& init_paths, RngStream& rng,
                       const IpmcmcOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (M < 1) throw Error("ipmcmc", "iteration count M must be >= 1");
    if (N < 2) throw Error("ipmcmc", "conditional sweeps need N >= 2");
    if (obs.empty()) throw Error("ipmcmc", "observation series is empty");
    if (init_paths.size() != P)
        throw Error("ipmcmc", "need exactly P initial reference paths");
    for (const auto& path : init_paths)
        if (path.size() != obs.size())
            throw Error("ipmcmc", "initial path length does not match observations");
    const bool infer = theta.mode == ThetaSpec::Mode::infer;
    if (infer) prior.validate();

    std::vector<std::size_t> ids(P);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    NodePool pool{R, P, ids};
    pool.validate();

    double q = infer ? theta.init.q : theta.fixed_q;
    double r = infer ? theta.init.r : theta.fixed_r;
    if (!(q > 0.0) || !(r > 0.0)) throw Error("ipmcmc", "theta values must be positive");

    IpmcmcTrace trace;
    trace.num_nodes = R;
    trace.num_conditional = P;
    trace.meta.N = N;
    trace.meta.M = M;
    trace.meta.T = obs.size();
    trace.meta.seed = rng.key();
    trace.meta.sampler_name = "ipmcmc";
    trace.q.reserve(M);
    trace.r.reserve(M);
    trace.chain_ids.reserve(M);
    trace.swapped.reserve(M);

    std::vector<Trajectory> chains = init_paths;

    const auto record = [&](std::size_t iter, std::uint8_t swapped_flag) {
        trace.q.push_back(q);
        trace.r.push_back(r);
        trace.chain_ids.push_back(ids);
        trace.swapped.push_back(swapped_flag);
        if (opts.state_thin > 0 && (iter - 1) % opts.state_thin == 0) {
            trace.states.push_back(chains);
            trace.state_iters.push_back(iter);
        }
    };
    record(1, 0);

    std::vector<ParticleSystem> systems(R);
    std::vector<Trajectory> draws(R);
    std::vector<double> lzs(R, 0.0);
    std::vector<std::size_t> chain_of_node(R, kUnassigned);

    for (std::size_t m = 2; m <= M; ++m) {
        if (infer) {
            q = sample_q_posterior(prior, chains[0], model, rng);
            r = sample_r_posterior(prior, chains[0], obs, model, rng);
        }
        const NoiseParams th(q, r);

        std::fill(chain_of_node.begin(), chain_of_node.end(), kUnassigned);
        for (std::size_t j = 0; j < P; ++j) chain_of_node[ids[j]] = j;

        parallel_for(R, opts.num_threads, [&](std::size_t node) {
            RngStream node_rng = rng.substream(m, node);
            if (chain_of_node[node] != kUnassigned) {
                SweepResult res = csmc(model, th, obs, chains[chain_of_node[node]], N,
                                       node_rng, opts.smc, &systems[node]);
                lzs[node] = res.log_marginal;
                draws[node] = std::move(res.sampled_path);
            } else {
                FilterResult res = bootstrap_pf(model, th, obs, N, node_rng, opts.smc);
                lzs[node] = res.draw.log_marginal;
                draws[node] = std::move(res.draw.sampled_path);
            }
        });

        RngStream coord_rng = rng.substream(m, R);
        std::vector<std::size_t> new_ids = resample_conditional_ids(lzs, ids, coord_rng);
        const std::uint8_t swapped_flag = new_ids != ids ? 1 : 0;
        ids = std::move(new_ids);
        for (std::size_t j = 0; j < P; ++j) chains[j] = std::move(draws[ids[j]]);
        record(m, swapped_flag);
    }

    trace.meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace pgkit
