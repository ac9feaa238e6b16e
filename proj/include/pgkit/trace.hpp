#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pgkit/model.hpp"

namespace pgkit {

struct TraceMeta {
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    std::string sampler_name;
    double wall_time_seconds = 0.0;
};

// Recorded draws of one MCMC run. q/r hold one entry per iteration; state
// snapshots may be thinned, with state_iters holding each snapshot's 1-based
// iteration number.
struct Trace {
    std::vector<double> q;
    std::vector<double> r;
    std::vector<Trajectory> states;
    std::vector<std::size_t> state_iters;
    TraceMeta meta;

    std::size_t iterations() const noexcept { return q.size(); }
};

// How the outer sampler treats the noise parameters.
struct ThetaSpec {
    enum class Mode { fixed, infer };
    Mode mode = Mode::fixed;
    double fixed_q = 1.0;
    double fixed_r = 1.0;
    // Used in infer mode; also provides the initial theta for the first sweep.
    struct Init {
        double q = 1.0;
        double r = 1.0;
    } init;

    static ThetaSpec fixed_at(double q, double r) {
        ThetaSpec s;
        s.mode = Mode::fixed;
        s.fixed_q = q;
        s.fixed_r = r;
        return s;
    }
    static ThetaSpec inferred(double init_q = 1.0, double init_r = 1.0) {
        ThetaSpec s;
        s.mode = Mode::infer;
        s.init.q = init_q;
        s.init.r = init_r;
        return s;
    }
};

}  // namespace pgkit
