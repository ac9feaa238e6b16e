#include "pgkit/pg.hpp"

#include <chrono>
#include <utility>

#include "pgkit/errors.hpp"

namespace pgkit {

Trajectory make_initial_path(const SsmModel& model, const NoiseParams& theta,
                             const ObservationSeries& obs, std::size_t N,
                             RngStream& rng, const SmcOptions& opts) {
    return bootstrap_pf(model, theta, obs, N, rng, opts).draw.sampled_path;
}

namespace {

Trace run_pg_impl(const SsmModel& model, const ObservationSeries& obs,
                  const InvGammaPrior& prior, std::size_t N, std::size_t M,
                  const Trajectory& init_path, const NoiseParams& init_theta,
                  RngStream& rng, bool ancestor_sampling, const PgRunOptions& opts,
                  const char* sampler_name) {
    const auto t0 = std::chrono::steady_clock::now();
    if (M < 1) throw Error("pg-samplers", "iteration count M must be >= 1");
    if (init_path.size() != obs.size())
        throw Error("pg-samplers", "initial path length does not match observations");
    if (opts.infer_theta) prior.validate();

    Trace trace;
    trace.q.reserve(M);
    trace.r.reserve(M);
    trace.meta.N = N;
    trace.meta.M = M;
    trace.meta.T = obs.size();
    trace.meta.seed = rng.key();
    trace.meta.sampler_name = sampler_name;

    Trajectory path = init_path;
    double q = init_theta.q;
    double r = init_theta.r;

    const auto record = [&](std::size_t iter) {
        trace.q.push_back(q);
        trace.r.push_back(r);
        if (opts.state_thin > 0 && (iter - 1) % opts.state_thin == 0) {
            trace.states.push_back(path);
            trace.state_iters.push_back(iter);
        }
    };
    record(1);

    ParticleSystem workspace;
    for (std::size_t m = 2; m <= M; ++m) {
        if (opts.infer_theta) {
            q = sample_q_posterior(prior, path, model, rng);
            r = sample_r_posterior(prior, path, obs, model, rng);
        }
        const NoiseParams theta(q, r);
        SweepResult sweep = ancestor_sampling
                                ? csmc_as(model, theta, obs, path, N, rng, opts.smc, &workspace)
                                : csmc(model, theta, obs, path, N, rng, opts.smc, &workspace);
        path = std::move(sweep.sampled_path);
        record(m);
    }

    trace.meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace

Trace pg_run(const SsmModel& model, const ObservationSeries& obs,
             const InvGammaPrior& prior, std::size_t N, std::size_t M,
             const Trajectory& init_path, const NoiseParams& init_theta,
             RngStream& rng, const PgRunOptions& opts) {
    return run_pg_impl(model, obs, prior, N, M, init_path, init_theta, rng, false, opts, "pg");
}

Trace pgas_run(const SsmModel& model, const ObservationSeries& obs,
               const InvGammaPrior& prior, std::size_t N, std::size_t M,
               const Trajectory& init_path, const NoiseParams& init_theta,
               RngStream& rng, bool ancestor_sampling, const PgRunOptions& opts) {
    return run_pg_impl(model, obs, prior, N, M, init_path, init_theta, rng, ancestor_sampling,
                       opts, "pgas");
}

}  // namespace pgkit
