#include "pgkit/blocked.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "pgkit/errors.hpp"
#include "pgkit/parallel.hpp"
#include "pgkit/pg.hpp"
#include "pgkit/weights.hpp"

namespace pgkit {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::size_t draw_from_probs(std::span<const double> probs, RngStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

std::string block_label(const Block& block) {
    return "block " + std::to_string(block.first + 1) + ".." + std::to_string(block.last + 1);
}

}  // namespace

BlockPartition make_blocks(std::size_t T, std::size_t L, std::size_t p) {
    if (T == 0) throw Error("blocked-pg", "series length must be positive");
    if (L < 2) throw Error("blocked-pg", "block length must be at least 2");
    if (L > T) throw Error("blocked-pg", "block length exceeds series length");
    if (2 * p >= L) throw Error("blocked-pg", "overlap must satisfy 2p < L");

    BlockPartition part;
    part.block_len = L;
    part.overlap = p;
    std::size_t first = 0;
    for (;;) {
        const std::size_t last = std::min(first + L - 1, T - 1);
        part.blocks.push_back(Block{first, last});
        if (last == T - 1) break;
        first = last - p + 1;
    }
    return part;
}

SweepResult blocked_csmc(const SsmModel& model, const NoiseParams& params,
                         const ObservationSeries& obs, const Trajectory& reference,
                         const Block& block, const BlockBoundary& boundary,
                         std::size_t N, RngStream& rng, const SmcOptions& opts,
                         ParticleSystem* out_system) {
    const std::size_t T = obs.size();
    if (T == 0) throw Error("blocked-pg", "empty observation series");
    if (N < 2) throw Error("blocked-pg", "conditional sweep needs N >= 2");
    if (reference.size() != T)
        throw Error("blocked-pg", "reference length does not match observations");
    if (block.first > block.last || block.last >= T)
        throw Error("blocked-pg", "block indices out of range");
    if (boundary.initial_state.has_value() != (block.first > 0))
        throw Error("blocked-pg", block.first > 0
                                      ? "interior block needs an initial boundary state"
                                      : "leading block cannot take an initial boundary state");
    if (boundary.terminal_state.has_value() != (block.last + 1 < T))
        throw Error("blocked-pg", block.last + 1 < T
                                      ? "interior block needs a terminal boundary state"
                                      : "trailing block cannot take a terminal boundary state");

    const std::size_t B = block.length();
    ParticleSystem local;
    ParticleSystem& ps = out_system ? *out_system : local;
    ps.resize(B, N);
    std::vector<double> probs(N);
    std::vector<std::size_t> sys_idx;
    AliasTable alias;

    const std::size_t pin = N - 1;
    const double sq = std::sqrt(params.q);
    const double obs_const = -0.5 * (kLog2Pi + std::log(params.r));
    const double inv2r = 0.5 / params.r;
    const double trans_const = -0.5 * (kLog2Pi + std::log(params.q));
    const double inv2q = 0.5 / params.q;
    const double log_n = std::log(static_cast<double>(N));
    double logz = 0.0;
    double row_lse = 0.0;

    // Degenerate rows are reported with the absolute 1-based timestep plus
    // which block the sweep was running.
    const auto normalize_row = [&](std::size_t b, const char* extra) {
        const long abs_t = static_cast<long>(block.first + b) + 1;
        try {
            return normalize_log_weights_into(ps.weight_row(b), probs, abs_t);
        } catch (const DegenerateWeightsError&) {
            std::string detail = block_label(block);
            if (extra) detail += extra;
            throw DegenerateWeightsError("blocked-pg", abs_t, detail);
        }
    };

    {
        const double y = obs[block.first];
        for (std::size_t i = 0; i < N; ++i) {
            double x;
            if (i == pin) {
                x = reference[block.first];
            } else if (block.first == 0) {
                x = model.sample_initial(rng);
            } else {
                x = model.mean_transition(*boundary.initial_state,
                                          static_cast<long>(block.first)) +
                    sq * rng.normal();
            }
            ps.particle(0, i) = x;
            const double d = y - model.mean_observation(x);
            ps.log_weight(0, i) = obs_const - d * d * inv2r;
        }
        row_lse = normalize_row(0, nullptr);
        logz += row_lse - log_n;
    }

    for (std::size_t b = 1; b < B; ++b) {
        const std::size_t n_free = N - 1;
        if (opts.resampling == Resampling::multinomial) {
            alias.build(probs);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(b, i) = static_cast<int>(alias.draw(rng));
        } else {
            sys_idx = systematic_resample(probs, n_free, rng);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(b, i) = static_cast<int>(sys_idx[i]);
        }
        ps.ancestor(b, pin) = static_cast<int>(pin);

        const std::size_t a = block.first + b;
        const double y = obs[a];
        for (std::size_t i = 0; i < N; ++i) {
            double x;
            if (i == pin) {
                x = reference[a];
            } else {
                const double xp = ps.particle(b - 1, static_cast<std::size_t>(ps.ancestor(b, i)));
                x = model.mean_transition(xp, static_cast<long>(a)) + sq * rng.normal();
            }
            ps.particle(b, i) = x;
            const double d = y - model.mean_observation(x);
            ps.log_weight(b, i) = obs_const - d * d * inv2r;
        }
        row_lse = normalize_row(b, nullptr);
        logz += row_lse - log_n;
    }

    if (boundary.terminal_state) {
        // Fold the transition density into the fixed right neighbor into the
        // final-row weights, then replace the final row's contribution to the
        // marginal estimate with the corrected mass.
        const double xt = *boundary.terminal_state;
        const long t_next = static_cast<long>(block.last) + 1;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = xt - model.mean_transition(ps.particle(B - 1, i), t_next);
            ps.log_weight(B - 1, i) += trans_const - d * d * inv2q;
        }
        const double corrected_lse = normalize_row(B - 1, ", terminal correction");
        logz += corrected_lse - row_lse;
    }

    SweepResult result;
    result.chosen_index = draw_from_probs(probs, rng);
    result.sampled_path = ps.trace_lineage(result.chosen_index);
    result.log_marginal = logz;
    return result;
}

Trace blocked_pg_run(const SsmModel& model, const ObservationSeries& obs,
                     const ThetaSpec& theta, const InvGammaPrior& prior,
                     std::size_t N, std::size_t M, std::size_t L, std::size_t p,
                     RngStream& rng, const BlockedPgOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t T = obs.size();
    if (T == 0) throw Error("blocked-pg", "observation series is empty");
    if (M < 1) throw Error("blocked-pg", "iteration count M must be >= 1");
    if (N < 2) throw Error("blocked-pg", "conditional sweeps need N >= 2");
    const BlockPartition part = make_blocks(T, L, p);
    const bool infer = theta.mode == ThetaSpec::Mode::infer;
    if (infer) prior.validate();

    double q = infer ? theta.init.q : theta.fixed_q;
    double r = infer ? theta.init.r : theta.fixed_r;
    if (!(q > 0.0) || !(r > 0.0)) throw Error("blocked-pg", "theta values must be positive");

    Trace trace;
    trace.meta.N = N;
    trace.meta.M = M;
    trace.meta.T = T;
    trace.meta.seed = rng.key();
    trace.meta.sampler_name = "blocked_pg";
    trace.q.reserve(M);
    trace.r.reserve(M);

    Trajectory path = make_initial_path(model, NoiseParams(q, r), obs, N, rng, opts.smc);

    const auto record = [&](std::size_t iter) {
        trace.q.push_back(q);
        trace.r.push_back(r);
        if (opts.state_thin > 0 && (iter - 1) % opts.state_thin == 0) {
            trace.states.push_back(path);
            trace.state_iters.push_back(iter);
        }
    };
    record(1);

    const std::size_t J = part.blocks.size();
    std::vector<ParticleSystem> workspaces(J);

    for (std::size_t m = 2; m <= M; ++m) {
        if (infer) {
            q = sample_q_posterior(prior, path, model, rng);
            r = sample_r_posterior(prior, path, obs, model, rng);
        }
        const NoiseParams th(q, r);

        // Two sweeps per iteration: blocks at even positions, then odd.
        // Same-parity blocks are disjoint and their boundary reads land
        // strictly inside opposite-parity interiors, so the tasks of one
        // pass never touch a shared index and the result matches a
        // sequential scan regardless of thread count.
        for (std::size_t parity = 0; parity < 2; ++parity) {
            const std::size_t count = parity == 0 ? (J + 1) / 2 : J / 2;
            if (count == 0) continue;
            parallel_for(count, opts.num_threads, [&](std::size_t k) {
                const std::size_t j = 2 * k + parity;
                const Block& blk = part.blocks[j];
                BlockBoundary bd;
                if (blk.first > 0) bd.initial_state = path[blk.first - 1];
                if (blk.last + 1 < T) bd.terminal_state = path[blk.last + 1];
                RngStream block_rng = rng.substream(m, j);
                SweepResult res = blocked_csmc(model, th, obs, path, blk, bd, N, block_rng,
                                               opts.smc, &workspaces[j]);
                std::copy(res.sampled_path.begin(), res.sampled_path.end(),
                          path.begin() + static_cast<std::ptrdiff_t>(blk.first));
            });
        }
        record(m);
    }

    trace.meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace pgkit
