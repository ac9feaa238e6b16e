#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgkit/conjugate.hpp"
#include "pgkit/smc.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

enum class SamplerKind { smc, pg, pgas, ipmcmc, blocked_pg, collapsed_pg };
enum class ModelKind { benchmark, linear_gaussian };

const char* to_string(SamplerKind kind);
const char* to_string(ModelKind kind);

// One archivable experiment description, parsed from a flat key = value file.
// Grammar: one `key = value` pair per line, '#' starts a comment, blank lines
// ignored. Keys: sampler, model, T, N, M, seed, theta_mode, prior_alpha_q,
// prior_beta_q, prior_alpha_r, prior_beta_r, state_thin, resampling, plus
// R and P (ipmcmc only), block_len and overlap (blocked_pg only), and
// model_a, model_c, model_m0, model_p0 (linear_gaussian only).
// theta_mode is `infer` or `fixed(Q, R)`.
struct RunConfig {
    SamplerKind sampler = SamplerKind::pg;
    ModelKind model = ModelKind::benchmark;
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t T = 500;
    std::uint64_t seed = 0;
    ThetaSpec theta = ThetaSpec::fixed_at(0.1, 1.0);
    InvGammaPrior prior{};
    std::size_t node_count = 0;         // ipmcmc R
    std::size_t conditional_count = 0;  // ipmcmc P
    std::size_t block_len = 0;          // blocked_pg
    std::size_t overlap = 0;            // blocked_pg
    double model_a = 0.0;               // linear_gaussian coefficients
    double model_c = 0.0;
    double model_m0 = 0.0;
    double model_p0 = 0.0;
    std::size_t state_thin = 1;
    Resampling resampling = Resampling::multinomial;

    // Cross-field invariants; throws ConfigError. The parser calls this.
    void validate() const;
};

// Benchmark matrix: the cartesian product of samplers x M_values x N_values,
// sharing one model/theta/prior block. Keys as in RunConfig except that
// sampler, N and M are replaced by comma-separated samplers, N_values and
// M_values.
struct BenchConfig {
    RunConfig base;  // sampler/N/M unset; per-cell copies fill them in
    std::vector<SamplerKind> samplers;
    std::vector<std::size_t> m_values;
    std::vector<std::size_t> n_values;
};

RunConfig parse_run_config(const std::string& text);
BenchConfig parse_bench_config(const std::string& text);

// File loaders; both honor the PGKIT_SEED environment override.
RunConfig load_run_config(const std::string& path);
BenchConfig load_bench_config(const std::string& path);

// Value of PGKIT_SEED when set; throws ConfigError on a malformed value.
std::optional<std::uint64_t> env_seed_override();

}  // namespace pgkit
