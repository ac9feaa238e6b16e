#include "pgkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace pgkit {

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n == 0) throw Error("diagnostics", "acf of an empty series");
    if (max_lag >= n) throw Error("diagnostics", "acf max_lag must be below the series length");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : series) denom += (v - mean) * (v - mean);
    if (!(denom > 0.0))
        throw Error("diagnostics", "acf of a constant series is undefined");
    std::vector<double> out(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < n; ++t)
            num += (series[t] - mean) * (series[t + k] - mean);
        out[k] = num / denom;
    }
    return out;
}

Trace discard_burn_in(const Trace& trace) {
    const std::size_t m = trace.iterations();
    if (m < 3) throw Error("diagnostics", "burn-in discard needs at least 3 iterations");
    const std::size_t cut = m / 3;
    Trace out;
    out.meta = trace.meta;
    out.q.assign(trace.q.begin() + static_cast<std::ptrdiff_t>(cut), trace.q.end());
    out.r.assign(trace.r.begin() + static_cast<std::ptrdiff_t>(cut), trace.r.end());
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        if (trace.state_iters[i] > cut) {
            out.states.push_back(trace.states[i]);
            out.state_iters.push_back(trace.state_iters[i]);
        }
    }
    return out;
}

double state_rmse(const Trajectory& estimate, const Trajectory& truth) {
    if (estimate.size() != truth.size() || estimate.empty())
        throw Error("diagnostics", "rmse inputs must be equal-length and nonempty");
    double ss = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = estimate[i] - truth[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(estimate.size()));
}

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const ObservationSeries& obs,
                                    double init_mean, double init_var) {
    model.validate();
    const std::size_t T = obs.size();
    if (T == 0) throw Error("diagnostics", "empty observation series");
    if (!(init_var > 0.0)) throw Error("diagnostics", "initial variance must be positive");

    KalmanResult res;
    res.predicted_mean.resize(T);
    res.predicted_var.resize(T);
    res.filtered_mean.resize(T);
    res.filtered_var.resize(T);
    res.smoothed_mean.resize(T);
    res.smoothed_var.resize(T);

    double m = 0.0, p = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        double mp, pp;
        if (t == 0) {
            mp = init_mean;
            pp = init_var;
        } else {
            mp = model.a * m;
            pp = model.a * model.a * p + model.q;
        }
        res.predicted_mean[t] = mp;
        res.predicted_var[t] = pp;
        const double innovation = obs[t] - model.c * mp;
        const double s = model.c * model.c * pp + model.r;
        const double k = pp * model.c / s;
        m = mp + k * innovation;
        p = (1.0 - k * model.c) * pp;
        res.filtered_mean[t] = m;
        res.filtered_var[t] = p;
        res.loglik += -0.5 * (kLog2Pi + std::log(s)) - 0.5 * innovation * innovation / s;
    }

    res.smoothed_mean[T - 1] = res.filtered_mean[T - 1];
    res.smoothed_var[T - 1] = res.filtered_var[T - 1];
    for (std::size_t t = T - 1; t-- > 0;) {
        const double g = res.filtered_var[t] * model.a / res.predicted_var[t + 1];
        res.smoothed_mean[t] =
            res.filtered_mean[t] + g * (res.smoothed_mean[t + 1] - res.predicted_mean[t + 1]);
        res.smoothed_var[t] =
            res.filtered_var[t] + g * g * (res.smoothed_var[t + 1] - res.predicted_var[t + 1]);
    }
    return res;
}

KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const ObservationSeries& obs) {
    return kalman_filter_smoother(model, obs, model.m0, model.p0);
}

ParamSummary summarize(std::span<const double> draws) {
    if (draws.empty()) throw Error("diagnostics", "cannot summarize an empty chain");
    ParamSummary s;
    const double n = static_cast<double>(draws.size());
    for (double v : draws) s.mean += v;
    s.mean /= n;
    double ss = 0.0;
    for (double v : draws) ss += (v - s.mean) * (v - s.mean);
    s.sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double prob) {
        const double h = prob * (n - 1.0);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = h - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    s.q025 = quantile(0.025);
    s.q975 = quantile(0.975);
    return s;
}

}  // namespace pgkit
