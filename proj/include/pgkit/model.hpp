#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pgkit/errors.hpp"
#include "pgkit/rng.hpp"

namespace pgkit {

using Trajectory = std::vector<double>;         // latent states x_1..x_T
using ObservationSeries = std::vector<double>;  // observations y_1..y_T

// Process and observation noise variances (Q, R).
struct NoiseParams {
    double q;
    double r;

    NoiseParams(double q_, double r_) : q(q_), r(r_) {
        if (!(q > 0.0) || !(r > 0.0))
            throw Error("model", "noise variances must be positive");
    }
};

double gaussian_logpdf(double x, double mean, double var);

// Scalar state-space model with additive Gaussian noise on both equations:
//
//   x_t = mean_transition(x_{t-1}, t-1) + e_t,   e_t ~ N(0, Q)
//   y_t = mean_observation(x_t) + w_t,           w_t ~ N(0, R)
//
// Times are 1-based. The time argument of mean_transition is always the
// 1-based index of the source state, which equals the 0-based array slot of
// the destination; call sites propagating into slot s pass s.
class SsmModel {
public:
    virtual ~SsmModel() = default;

    virtual double mean_transition(double x, long t) const = 0;
    virtual double mean_observation(double x) const = 0;

    // Initial-state draw; a Dirac point mass for models that pin x_1.
    virtual double sample_initial(RngStream& rng) const = 0;

    double sample_transition(double x_prev, long t, double q, RngStream& rng) const;
    double transition_logpdf(double x, double x_prev, long t, double q) const;
    double observation_logpdf(double y, double x, double r) const;
};

// f(x, t) = x/2 + 25 x/(1 + x^2) + 8 cos(1.2 t)
double benchmark_f(double x, long t);
// g(x) = x^2 / 20
double benchmark_g(double x);

// The standard nonlinear benchmark model; x_1 is fixed at 0. The cosine
// drift is precomputed up to precompute_horizon so hot loops avoid trig.
class BenchmarkModel final : public SsmModel {
public:
    explicit BenchmarkModel(std::size_t precompute_horizon = 2048);

    double mean_transition(double x, long t) const override {
        const double drift = (t >= 0 && static_cast<std::size_t>(t) < drift_.size())
                                 ? drift_[static_cast<std::size_t>(t)]
                                 : 8.0 * std::cos(1.2 * static_cast<double>(t));
        return 0.5 * x + 25.0 * x / (1.0 + x * x) + drift;
    }

    double mean_observation(double x) const override { return x * x / 20.0; }

    double sample_initial(RngStream&) const override { return 0.0; }

private:
    std::vector<double> drift_;
};

// Scalar linear-Gaussian model x_t = a x_{t-1} + e_t, y_t = c x_t + w_t,
// x_1 ~ N(m0, p0). p0 = 0 pins the initial state.
class LinearGaussianSsm final : public SsmModel {
public:
    LinearGaussianSsm(double a, double c, double m0, double p0);

    double mean_transition(double x, long) const override { return a_ * x; }
    double mean_observation(double x) const override { return c_ * x; }
    double sample_initial(RngStream& rng) const override {
        return sd0_ > 0.0 ? rng.normal(m0_, sd0_) : m0_;
    }

    double a() const noexcept { return a_; }
    double c() const noexcept { return c_; }
    double m0() const noexcept { return m0_; }
    double p0() const noexcept { return sd0_ * sd0_; }

private:
    double a_, c_, m0_, sd0_;
};

struct SimulationResult {
    Trajectory states;
    ObservationSeries observations;
};

// Draws one synthetic dataset of length T. Per timestep the process noise is
// drawn before the observation noise.
SimulationResult simulate(const SsmModel& model, const NoiseParams& params,
                          std::size_t T, RngStream& rng);

}  // namespace pgkit
