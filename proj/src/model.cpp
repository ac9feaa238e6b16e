#include "pgkit/model.hpp"

#include <cmath>

namespace pgkit {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double gaussian_logpdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * d * d / var;
}

double SsmModel::sample_transition(double x_prev, long t, double q, RngStream& rng) const {
    return mean_transition(x_prev, t) + std::sqrt(q) * rng.normal();
}

double SsmModel::transition_logpdf(double x, double x_prev, long t, double q) const {
    return gaussian_logpdf(x, mean_transition(x_prev, t), q);
}

double SsmModel::observation_logpdf(double y, double x, double r) const {
    return gaussian_logpdf(y, mean_observation(x), r);
}

double benchmark_f(double x, long t) {
    return 0.5 * x + 25.0 * x / (1.0 + x * x) + 8.0 * std::cos(1.2 * static_cast<double>(t));
}

double benchmark_g(double x) { return x * x / 20.0; }

BenchmarkModel::BenchmarkModel(std::size_t precompute_horizon) {
    drift_.resize(precompute_horizon + 1);
    for (std::size_t t = 0; t <= precompute_horizon; ++t)
        drift_[t] = 8.0 * std::cos(1.2 * static_cast<double>(t));
}

LinearGaussianSsm::LinearGaussianSsm(double a, double c, double m0, double p0)
    : a_(a), c_(c), m0_(m0), sd0_(0.0) {
    if (!(p0 >= 0.0) || !std::isfinite(p0))
        throw Error("model", "initial variance p0 must be nonnegative");
    sd0_ = std::sqrt(p0);
}

SimulationResult simulate(const SsmModel& model, const NoiseParams& params,
                          std::size_t T, RngStream& rng) {
    if (T == 0) throw Error("model", "simulation length T must be positive");
    SimulationResult out;
    out.states.resize(T);
    out.observations.resize(T);
    const double sq = std::sqrt(params.q);
    const double sr = std::sqrt(params.r);
    out.states[0] = model.sample_initial(rng);
    out.observations[0] = model.mean_observation(out.states[0]) + sr * rng.normal();
    for (std::size_t s = 1; s < T; ++s) {
        out.states[s] = model.mean_transition(out.states[s - 1], static_cast<long>(s)) + sq * rng.normal();
        out.observations[s] = model.mean_observation(out.states[s]) + sr * rng.normal();
    }
    return out;
}

}  // namespace pgkit
