#include "pgkit/smc.hpp"

#include <cmath>

#include "pgkit/errors.hpp"
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

void ancestor_logweights_into(const SsmModel& model, double q,
                              std::span<const double> log_w_prev,
                              std::span<const double> particles_prev,
                              double reference_next, long t_prev,
                              std::span<double> out) {
    const double c = -0.5 * (kLog2Pi + std::log(q));
    const double inv2q = 0.5 / q;
    for (std::size_t i = 0; i < particles_prev.size(); ++i) {
        const double d = reference_next - model.mean_transition(particles_prev[i], t_prev);
        out[i] = log_w_prev[i] + c - d * d * inv2q;
    }
}

// Shared sweep core. reference == nullptr gives the plain bootstrap filter;
// otherwise the last index is pinned and ancestor_sampling selects how its
// ancestor is chosen. Writes the dense record into ps (reused storage).
SweepResult run_sweep(const SsmModel& model, const NoiseParams& params,
                      const ObservationSeries& obs, std::size_t N, RngStream& rng,
                      const SmcOptions& opts, const Trajectory* reference,
                      bool ancestor_sampling, ParticleSystem& ps,
                      std::vector<double>* filtered_means) {
    const std::size_t T = obs.size();
    if (T == 0) throw Error("smc-kernels", "empty observation series");
    if (reference) {
        if (N < 2) throw Error("smc-kernels", "conditional sweep needs N >= 2");
        if (reference->size() != T)
            throw Error("smc-kernels", "reference length does not match observations");
    } else if (N < 1) {
        throw Error("smc-kernels", "bootstrap filter needs N >= 1");
    }

    ps.resize(T, N);
    std::vector<double> probs(N);
    std::vector<double> as_logw;
    std::vector<double> as_probs;
    std::vector<std::size_t> sys_idx;
    AliasTable alias;

    const std::size_t pin = N - 1;
    const double sq = std::sqrt(params.q);
    const double obs_const = -0.5 * (kLog2Pi + std::log(params.r));
    const double inv2r = 0.5 / params.r;
    const double log_n = std::log(static_cast<double>(N));
    double logz = 0.0;

    if (filtered_means) filtered_means->assign(T, 0.0);

    for (std::size_t i = 0; i < N; ++i) {
        const double x = (reference && i == pin) ? (*reference)[0] : model.sample_initial(rng);
        ps.particle(0, i) = x;
        const double d = obs[0] - model.mean_observation(x);
        ps.log_weight(0, i) = obs_const - d * d * inv2r;
    }
    logz += normalize_log_weights_into(ps.weight_row(0), probs, 1) - log_n;
    if (filtered_means) {
        double m = 0.0;
        for (std::size_t i = 0; i < N; ++i) m += probs[i] * ps.particle(0, i);
        (*filtered_means)[0] = m;
    }

    for (std::size_t s = 1; s < T; ++s) {
        const std::size_t n_free = reference ? N - 1 : N;
        if (opts.resampling == Resampling::multinomial) {
            alias.build(probs);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(s, i) = static_cast<int>(alias.draw(rng));
        } else {
            sys_idx = systematic_resample(probs, n_free, rng);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(s, i) = static_cast<int>(sys_idx[i]);
        }
        if (reference) {
            if (ancestor_sampling) {
                as_logw.resize(N);
                as_probs.resize(N);
                for (std::size_t i = 0; i < N; ++i) as_logw[i] = std::log(probs[i]);
                // In-place update is safe: each slot is read before it is written.
                ancestor_logweights_into(model, params.q, as_logw, ps.particle_row(s - 1),
                                         (*reference)[s], static_cast<long>(s), as_logw);
                normalize_log_weights_into(as_logw, as_probs, static_cast<long>(s) + 1);
                ps.ancestor(s, pin) = static_cast<int>(draw_from_probs(as_probs, rng));
            } else {
                ps.ancestor(s, pin) = static_cast<int>(pin);
            }
        }

        const double y = obs[s];
        for (std::size_t i = 0; i < N; ++i) {
            double x;
            if (reference && i == pin) {
                x = (*reference)[s];
            } else {
                const double xp = ps.particle(s - 1, static_cast<std::size_t>(ps.ancestor(s, i)));
                x = model.mean_transition(xp, static_cast<long>(s)) + sq * rng.normal();
            }
            ps.particle(s, i) = x;
            const double d = y - model.mean_observation(x);
            ps.log_weight(s, i) = obs_const - d * d * inv2r;
        }
        logz += normalize_log_weights_into(ps.weight_row(s), probs, static_cast<long>(s) + 1) - log_n;
        if (filtered_means) {
            double m = 0.0;
            for (std::size_t i = 0; i < N; ++i) m += probs[i] * ps.particle(s, i);
            (*filtered_means)[s] = m;
        }
    }

    SweepResult result;
    result.chosen_index = draw_from_probs(probs, rng);
    result.sampled_path = ps.trace_lineage(result.chosen_index);
    result.log_marginal = logz;
    return result;
}

}  // namespace

FilterResult bootstrap_pf(const SsmModel& model, const NoiseParams& params,
                          const ObservationSeries& obs, std::size_t N,
                          RngStream& rng, const SmcOptions& opts) {
    FilterResult out;
    out.draw = run_sweep(model, params, obs, N, rng, opts, nullptr, false, out.system,
                         &out.filtered_means);
    return out;
}

SweepResult csmc(const SsmModel& model, const NoiseParams& params,
                 const ObservationSeries& obs, const Trajectory& reference,
                 std::size_t N, RngStream& rng, const SmcOptions& opts,
                 ParticleSystem* out_system) {
    ParticleSystem local;
    ParticleSystem& ps = out_system ? *out_system : local;
    return run_sweep(model, params, obs, N, rng, opts, &reference, false, ps, nullptr);
}

SweepResult csmc_as(const SsmModel& model, const NoiseParams& params,
                    const ObservationSeries& obs, const Trajectory& reference,
                    std::size_t N, RngStream& rng, const SmcOptions& opts,
                    ParticleSystem* out_system) {
    ParticleSystem local;
    ParticleSystem& ps = out_system ? *out_system : local;
    return run_sweep(model, params, obs, N, rng, opts, &reference, true, ps, nullptr);
}

std::vector<double> ancestor_weights(const SsmModel& model, const NoiseParams& params,
                                     std::span<const double> log_w_prev,
                                     std::span<const double> particles_prev,
                                     double reference_next, long t_prev) {
    if (log_w_prev.size() != particles_prev.size())
        throw Error("smc-kernels", "ancestor weight inputs differ in length");
    std::vector<double> logw(log_w_prev.size());
    ancestor_logweights_into(model, params.q, log_w_prev, particles_prev, reference_next,
                             t_prev, logw);
    return normalize_log_weights(logw);
}

}  // namespace pgkit
