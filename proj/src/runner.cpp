#include "pgkit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <memory>
#include <ostream>

#include "pgkit/blocked.hpp"
#include "pgkit/collapsed.hpp"
#include "pgkit/diagnostics.hpp"
#include "pgkit/errors.hpp"
#include "pgkit/ipmcmc.hpp"
#include "pgkit/pg.hpp"
#include "pgkit/smc.hpp"

namespace pgkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::unique_ptr<SsmModel> build_model(const RunConfig& cfg) {
    if (cfg.model == ModelKind::benchmark)
        return std::make_unique<BenchmarkModel>(std::max<std::size_t>(cfg.T + 2, 2048));
    return std::make_unique<LinearGaussianSsm>(cfg.model_a, cfg.model_c, cfg.model_m0,
                                               cfg.model_p0);
}

// The theta used for simulation, initial paths, and fixed-theta sweeps. In
// infer mode this is the chain's starting point.
NoiseParams sweep_theta(const RunConfig& cfg) {
    if (cfg.theta.mode == ThetaSpec::Mode::fixed)
        return NoiseParams(cfg.theta.fixed_q, cfg.theta.fixed_r);
    return NoiseParams(cfg.theta.init.q, cfg.theta.init.r);
}

Trace run_smc(const RunConfig& cfg, const SsmModel& model, const ObservationSeries& obs,
              RngStream& rng, const SmcOptions& smc_opts, nlohmann::json& extra) {
    const auto start = Clock::now();
    const NoiseParams theta = sweep_theta(cfg);
    Trace trace;
    trace.meta.N = cfg.N;
    trace.meta.M = cfg.M;
    trace.meta.T = obs.size();
    trace.meta.seed = rng.key();
    trace.meta.sampler_name = "smc";
    double sum_logz = 0.0;
    for (std::size_t m = 1; m <= cfg.M; ++m) {
        const FilterResult sweep = bootstrap_pf(model, theta, obs, cfg.N, rng, smc_opts);
        trace.q.push_back(theta.q);
        trace.r.push_back(theta.r);
        if (cfg.state_thin > 0 && (m - 1) % cfg.state_thin == 0) {
            trace.states.push_back(sweep.draw.sampled_path);
            trace.state_iters.push_back(m);
        }
        sum_logz += sweep.draw.log_marginal;
    }
    extra["mean_log_marginal"] = sum_logz / static_cast<double>(cfg.M);
    trace.meta.wall_time_seconds = seconds_since(start);
    return trace;
}

Trace run_sampler(const RunConfig& cfg, const SsmModel& model, const ObservationSeries& obs,
                  RngStream& rng, std::size_t threads, nlohmann::json& extra) {
    const SmcOptions smc_opts{cfg.resampling};
    const NoiseParams init_theta = sweep_theta(cfg);
    switch (cfg.sampler) {
        case SamplerKind::smc:
            return run_smc(cfg, model, obs, rng, smc_opts, extra);
        case SamplerKind::pg:
        case SamplerKind::pgas: {
            PgRunOptions opts;
            opts.infer_theta = cfg.theta.mode == ThetaSpec::Mode::infer;
            opts.state_thin = cfg.state_thin;
            opts.smc = smc_opts;
            const Trajectory init =
                make_initial_path(model, init_theta, obs, cfg.N, rng, smc_opts);
            if (cfg.sampler == SamplerKind::pg)
                return pg_run(model, obs, cfg.prior, cfg.N, cfg.M, init, init_theta, rng, opts);
            return pgas_run(model, obs, cfg.prior, cfg.N, cfg.M, init, init_theta, rng, true,
                            opts);
        }
        case SamplerKind::ipmcmc: {
            IpmcmcOptions opts;
            opts.state_thin = cfg.state_thin;
            opts.num_threads = threads;
            opts.smc = smc_opts;
            std::vector<Trajectory> init_paths;
            init_paths.reserve(cfg.conditional_count);
            for (std::size_t j = 0; j < cfg.conditional_count; ++j)
                init_paths.push_back(make_initial_path(model, init_theta, obs, cfg.N, rng,
                                                       smc_opts));
            const IpmcmcTrace pool =
                ipmcmc_run(model, obs, cfg.theta, cfg.prior, cfg.N, cfg.M, cfg.node_count,
                           cfg.conditional_count, init_paths, rng, opts);
            Trace trace;
            trace.q = pool.q;
            trace.r = pool.r;
            trace.meta = pool.meta;
            trace.state_iters = pool.state_iters;
            trace.states.reserve(pool.states.size());
            for (const auto& chains : pool.states) trace.states.push_back(chains.front());
            double swaps = 0.0;
            for (std::uint8_t s : pool.swapped) swaps += s;
            extra["num_nodes"] = pool.num_nodes;
            extra["num_conditional"] = pool.num_conditional;
            extra["swap_rate"] = pool.swapped.empty()
                                     ? 0.0
                                     : swaps / static_cast<double>(pool.swapped.size());
            return trace;
        }
        case SamplerKind::blocked_pg: {
            BlockedPgOptions opts;
            opts.state_thin = cfg.state_thin;
            opts.num_threads = threads;
            opts.smc = smc_opts;
            return blocked_pg_run(model, obs, cfg.theta, cfg.prior, cfg.N, cfg.M, cfg.block_len,
                                  cfg.overlap, rng, opts);
        }
        case SamplerKind::collapsed_pg: {
            const GaussianVarianceConjugate conj(model, cfg.prior);
            CollapsedPgOptions opts;
            opts.state_thin = cfg.state_thin;
            opts.smc = smc_opts;
            const Trajectory init =
                make_initial_path(model, init_theta, obs, cfg.N, rng, smc_opts);
            return collapsed_pg_run(model, conj, obs, cfg.N, cfg.M, init, rng, opts);
        }
    }
    throw Error("cli", "unreachable sampler kind");
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

nlohmann::json summary_block(const ParamSummary& s) {
    return nlohmann::json{
        {"mean", s.mean}, {"sd", s.sd}, {"q025", s.q025}, {"q975", s.q975}};
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    cfg.validate();
    if (cfg.theta.mode != ThetaSpec::Mode::fixed)
        throw ConfigError("simulate requires theta_mode = fixed(Q, R)");
    const auto model = build_model(cfg);
    RngStream rng(cfg.seed);
    const SimulationResult sim = simulate(*model, sweep_theta(cfg), cfg.T, rng);
    write_data_csv(out_path, sim.states, sim.observations);
    out << "simulate: T=" << cfg.T << " Q=" << cfg.theta.fixed_q << " R=" << cfg.theta.fixed_r
        << " seed=" << cfg.seed << " -> " << out_path << '\n';
}

void cmd_run(const RunConfig& cfg, const std::string& data_path, const std::string& out_dir,
             std::ostream& out, const RunnerOptions& opts) {
    cfg.validate();
    const DataSet data = read_data_csv(data_path);
    if (data.observations.size() != cfg.T)
        throw ConfigError("key 'T': config says " + std::to_string(cfg.T) + " but " + data_path +
                          " has " + std::to_string(data.observations.size()) + " rows");

    const auto model = build_model(cfg);
    RngStream rng(cfg.seed);
    nlohmann::json extra;
    const Trace trace = run_sampler(cfg, *model, data.observations, rng, opts.threads, extra);

    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/";
    write_trace_csv(base + "trace.csv", trace);

    const bool infer = cfg.theta.mode == ThetaSpec::Mode::infer;
    const Trace kept = trace.iterations() >= 3 ? discard_burn_in(trace) : trace;
    const std::size_t burn = trace.iterations() - kept.iterations();

    nlohmann::json summary;
    summary["burn_in"] = burn;
    summary["kept"] = kept.iterations();
    if (infer) {
        summary["Q"] = summary_block(summarize(kept.q));
        summary["R"] = summary_block(summarize(kept.r));
        if (kept.iterations() >= 2) {
            const std::size_t max_lag = std::min<std::size_t>(50, kept.iterations() - 1);
            write_acf_csv(base + "acf_q.csv", acf(kept.q, max_lag));
            write_acf_csv(base + "acf_r.csv", acf(kept.r, max_lag));
        }
    }
    if (data.has_truth() && !kept.states.empty()) {
        Trajectory mean(cfg.T, 0.0);
        for (const Trajectory& path : kept.states)
            for (std::size_t t = 0; t < cfg.T; ++t) mean[t] += path[t];
        for (double& v : mean) v /= static_cast<double>(kept.states.size());
        summary["state_rmse"] = state_rmse(mean, data.states);
        summary["state_snapshots"] = kept.states.size();
    }
    write_json(base + "posterior_summary.json", summary);

    nlohmann::json meta;
    meta["sampler"] = to_string(cfg.sampler);
    meta["model"] = to_string(cfg.model);
    meta["N"] = cfg.N;
    meta["M"] = cfg.M;
    meta["T"] = cfg.T;
    meta["seed"] = cfg.seed;
    meta["threads"] = opts.threads;
    meta["data"] = data_path;
    meta["theta_mode"] = infer ? "infer" : "fixed";
    if (!infer) {
        meta["theta_q"] = cfg.theta.fixed_q;
        meta["theta_r"] = cfg.theta.fixed_r;
    } else {
        meta["prior"] = {{"alpha_q", cfg.prior.alpha_q},
                         {"beta_q", cfg.prior.beta_q},
                         {"alpha_r", cfg.prior.alpha_r},
                         {"beta_r", cfg.prior.beta_r}};
    }
    meta["resampling"] = cfg.resampling == Resampling::multinomial ? "multinomial" : "systematic";
    meta["state_thin"] = cfg.state_thin;
    meta["wall_time_seconds"] = trace.meta.wall_time_seconds;
    for (const auto& [key, value] : extra.items()) meta[key] = value;
    write_json(base + "run_meta.json", meta);

    out << "run: sampler=" << to_string(cfg.sampler) << " N=" << cfg.N << " M=" << cfg.M
        << " wall=" << trace.meta.wall_time_seconds << "s -> " << out_dir << '\n';
}

BenchReport cmd_bench(const BenchConfig& bench, const std::string& out_path, std::ostream& out,
                      const RunnerOptions& opts) {
    if (bench.samplers.empty() || bench.m_values.empty() || bench.n_values.empty())
        throw ConfigError("bench matrix is empty");

    const auto model = build_model(bench.base);
    RngStream data_rng = RngStream(bench.base.seed).substream(0);
    const SimulationResult sim =
        simulate(*model, sweep_theta(bench.base), bench.base.T, data_rng);

    BenchReport report;
    report.cpu = cpu_description();
    report.threads = opts.threads;
    std::size_t cell_index = 0;
    for (SamplerKind sampler : bench.samplers) {
        for (std::size_t m : bench.m_values) {
            for (std::size_t n : bench.n_values) {
                ++cell_index;
                BenchCell cell;
                cell.sampler = to_string(sampler);
                cell.M = m;
                cell.N = n;
                cell.wall_seconds = std::numeric_limits<double>::quiet_NaN();
                try {
                    RunConfig cfg = bench.base;
                    cfg.sampler = sampler;
                    cfg.M = m;
                    cfg.N = n;
                    cfg.state_thin = 0;  // timing only; snapshots would just burn memory
                    cfg.validate();
                    RngStream rng = RngStream(bench.base.seed).substream(cell_index);
                    nlohmann::json extra;
                    const auto start = Clock::now();
                    run_sampler(cfg, *model, sim.observations, rng, opts.threads, extra);
                    cell.wall_seconds = seconds_since(start);
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                out << "bench: " << cell.sampler << " M=" << cell.M << " N=" << cell.N << " ";
                if (cell.ok())
                    out << cell.wall_seconds << "s\n";
                else
                    out << "failed (" << cell.error << ")\n";
                report.rows.push_back(std::move(cell));
            }
        }
    }
    write_bench_csv(out_path, report);
    write_bench_meta_json(out_path + ".meta.json", report);
    return report;
}

void cmd_oracle(const RunConfig& cfg, const std::string& data_path, const std::string& out_path,
                std::ostream& out) {
    cfg.validate();
    if (cfg.model != ModelKind::linear_gaussian)
        throw ConfigError("oracle requires model = linear_gaussian");
    if (cfg.theta.mode != ThetaSpec::Mode::fixed)
        throw ConfigError("oracle requires theta_mode = fixed(Q, R)");
    const DataSet data = read_data_csv(data_path);
    if (data.observations.size() != cfg.T)
        throw ConfigError("key 'T': config says " + std::to_string(cfg.T) + " but " + data_path +
                          " has " + std::to_string(data.observations.size()) + " rows");
    LinearGaussianModel lg;
    lg.a = cfg.model_a;
    lg.c = cfg.model_c;
    lg.q = cfg.theta.fixed_q;
    lg.r = cfg.theta.fixed_r;
    lg.m0 = cfg.model_m0;
    lg.p0 = cfg.model_p0;
    const KalmanResult result = kalman_filter_smoother(lg, data.observations);
    write_kalman_csv(out_path, result);
    out << "oracle: loglik=" << format_double(result.loglik) << " -> " << out_path << '\n';
}

}  // namespace pgkit
