#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pgkit/model.hpp"

namespace pgkit {

// Dense record of one SMC sweep: particle values, unnormalized log weights
// and ancestor indices, all T x N row-major with row = 0-based timestep.
// Row 0 ancestors are self-indices (no resampling happens at the first step).
struct ParticleSystem {
    std::size_t T = 0;
    std::size_t N = 0;
    std::vector<double> particles;
    std::vector<double> log_weights;
    std::vector<int> ancestors;

    void resize(std::size_t T_, std::size_t N_);

    double& particle(std::size_t t, std::size_t i) noexcept { return particles[t * N + i]; }
    double particle(std::size_t t, std::size_t i) const noexcept { return particles[t * N + i]; }
    double& log_weight(std::size_t t, std::size_t i) noexcept { return log_weights[t * N + i]; }
    double log_weight(std::size_t t, std::size_t i) const noexcept { return log_weights[t * N + i]; }
    int& ancestor(std::size_t t, std::size_t i) noexcept { return ancestors[t * N + i]; }
    int ancestor(std::size_t t, std::size_t i) const noexcept { return ancestors[t * N + i]; }

    std::span<const double> weight_row(std::size_t t) const noexcept {
        return {log_weights.data() + t * N, N};
    }
    std::span<const double> particle_row(std::size_t t) const noexcept {
        return {particles.data() + t * N, N};
    }

    // Ancestral lineage of the final-step particle final_index, oldest first.
    Trajectory trace_lineage(std::size_t final_index) const;

    // log of prod_t (mean of unnormalized incremental weights at t).
    double log_marginal() const;
};

// One retained draw from a sweep.
struct SweepResult {
    Trajectory sampled_path;
    std::size_t chosen_index = 0;
    double log_marginal = 0.0;
};

// Debug dump of the full system as JSON {T, N, particles, log_weights, ancestors}.
void dump_particle_system_json(const ParticleSystem& ps, const std::string& path);

}  // namespace pgkit
