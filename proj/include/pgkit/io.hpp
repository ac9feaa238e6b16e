#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pgkit/diagnostics.hpp"
#include "pgkit/model.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

// One dataset file. The truth column is optional on input: simulate always
// writes it, external data may carry observations only.
struct DataSet {
    Trajectory states;  // empty when the file has no x column
    ObservationSeries observations;

    bool has_truth() const noexcept { return !states.empty(); }
};

// Shortest exact decimal form of v (%.17g); reading it back round-trips.
std::string format_double(double v);

// Header t,x,y; t runs 1..T.
void write_data_csv(const std::string& path, const Trajectory& states,
                    const ObservationSeries& observations);

// Accepts header t,x,y or t,y. Rows must carry consecutive 1-based t.
DataSet read_data_csv(const std::string& path);

// Header iter,Q,R and, when every recorded iteration has a state snapshot,
// columns x_1..x_T holding that iteration's retained path.
void write_trace_csv(const std::string& path, const Trace& trace);

// Header lag,acf with lags 0..K.
void write_acf_csv(const std::string& path, const std::vector<double>& values);

// Header t,filter_mean,filter_var,smooth_mean,smooth_var.
void write_kalman_csv(const std::string& path, const KalmanResult& result);

struct BenchCell {
    std::string sampler;
    std::size_t M = 0;
    std::size_t N = 0;
    double wall_seconds = 0.0;  // nan when the cell failed
    std::string error;          // empty on success

    bool ok() const noexcept { return error.empty(); }
};

struct BenchReport {
    std::vector<BenchCell> rows;
    std::string cpu;
    std::size_t threads = 1;
};

// Header sampler,M,N,wall_seconds; a failed cell prints nan in the last column.
void write_bench_csv(const std::string& path, const BenchReport& report);

// Sidecar with environment metadata and per-cell status.
void write_bench_meta_json(const std::string& path, const BenchReport& report);

// First "model name" line of /proc/cpuinfo, or "unknown".
std::string cpu_description();

}  // namespace pgkit
