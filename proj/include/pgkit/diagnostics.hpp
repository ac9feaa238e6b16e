#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgkit/errors.hpp"
#include "pgkit/model.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

// Autocorrelation with the biased (fixed n) denominator; values[0] == 1.
// Requires max_lag < series length and a non-constant series.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

// Drops the first floor(M/3) iterations. Requires M >= 3.
Trace discard_burn_in(const Trace& trace);

// Root mean squared error between two equal-length trajectories.
double state_rmse(const Trajectory& estimate, const Trajectory& truth);

// Scalar linear-Gaussian model for exact filtering:
//   x_1 ~ N(m0, p0), x_t = a x_{t-1} + e_t (q), y_t = c x_t + w_t (r).
struct LinearGaussianModel {
    double a = 1.0;
    double c = 1.0;
    double q = 1.0;
    double r = 1.0;
    double m0 = 0.0;
    double p0 = 1.0;

    void validate() const {
        if (!(q > 0.0) || !(r > 0.0) || !(p0 > 0.0))
            throw Error("diagnostics", "q, r and p0 must be positive");
    }
};

struct KalmanResult {
    std::vector<double> predicted_mean, predicted_var;
    std::vector<double> filtered_mean, filtered_var;
    std::vector<double> smoothed_mean, smoothed_var;
    double loglik = 0.0;
};

// Exact Kalman filter and RTS smoother. init_override, when nonnegative in
// the variance slot, replaces (m0, p0) as the prior of the first observation
// in obs; this supports restarting the filter mid-series.
KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const ObservationSeries& obs);
KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const ObservationSeries& obs,
                                    double init_mean, double init_var);

struct ParamSummary {
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
};

ParamSummary summarize(std::span<const double> draws);

}  // namespace pgkit
