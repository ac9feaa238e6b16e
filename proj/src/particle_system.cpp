#include "pgkit/particle_system.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pgkit/errors.hpp"
#include "pgkit/weights.hpp"

namespace pgkit {

void ParticleSystem::resize(std::size_t T_, std::size_t N_) {
    T = T_;
    N = N_;
    // No refill on reuse; sweeps overwrite every populated cell.
    particles.resize(T * N);
    log_weights.resize(T * N);
    ancestors.resize(T * N);
    for (std::size_t i = 0; i < N && T > 0; ++i) ancestors[i] = static_cast<int>(i);
}

Trajectory ParticleSystem::trace_lineage(std::size_t final_index) const {
    if (final_index >= N) throw Error("smc-kernels", "lineage index out of range");
    Trajectory path(T);
    std::size_t idx = final_index;
    for (std::size_t t = T; t-- > 0;) {
        path[t] = particle(t, idx);
        if (t > 0) idx = static_cast<std::size_t>(ancestor(t, idx));
    }
    return path;
}

double ParticleSystem::log_marginal() const {
    double lz = 0.0;
    const double log_n = std::log(static_cast<double>(N));
    for (std::size_t t = 0; t < T; ++t) lz += log_sum_exp(weight_row(t)) - log_n;
    return lz;
}

void dump_particle_system_json(const ParticleSystem& ps, const std::string& path) {
    nlohmann::json j;
    j["T"] = ps.T;
    j["N"] = ps.N;
    j["particles"] = ps.particles;
    j["log_weights"] = ps.log_weights;
    j["ancestors"] = ps.ancestors;
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace pgkit
