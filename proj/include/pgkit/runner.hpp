#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "pgkit/config.hpp"
#include "pgkit/io.hpp"

namespace pgkit {

struct RunnerOptions {
    std::size_t threads = 1;  // worker pool; only ipmcmc and blocked_pg use it
};

// Draws one dataset at the config's fixed theta, writes the t,x,y CSV and
// prints a one-line summary.
void cmd_simulate(const RunConfig& cfg, const std::string& out_path, std::ostream& out);

// Runs the configured sampler on a dataset. Writes trace.csv, run_meta.json,
// posterior_summary.json and, in infer mode, acf_q.csv / acf_r.csv into
// out_dir. Summaries and ACFs use the chain after the standard burn-in
// discard; the trace file keeps every iteration.
void cmd_run(const RunConfig& cfg, const std::string& data_path, const std::string& out_dir,
             std::ostream& out, const RunnerOptions& opts = {});

// Times every (sampler, M, N) cell of the matrix on one shared synthetic
// dataset. Failed cells are recorded and the run continues. Writes the CSV
// report to out_path and a JSON sidecar to out_path + ".meta.json".
BenchReport cmd_bench(const BenchConfig& bench, const std::string& out_path, std::ostream& out,
                      const RunnerOptions& opts = {});

// Exact Kalman filter/smoother for a linear_gaussian config; writes the
// per-timestep CSV and prints the log-likelihood.
void cmd_oracle(const RunConfig& cfg, const std::string& data_path,
                const std::string& out_path, std::ostream& out);

}  // namespace pgkit
