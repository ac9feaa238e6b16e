#include "pgkit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgkit/errors.hpp"

namespace pgkit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> log_values) {
    double m = kNegInf;
    for (double v : log_values) m = std::max(m, v);
    if (!std::isfinite(m)) return m;  // empty, all -inf, or a NaN/inf present
    double s = 0.0;
    for (double v : log_values) s += std::exp(v - m);
    return m + std::log(s);
}

double normalize_log_weights_into(std::span<const double> log_weights,
                                  std::span<double> probs_out, long t_for_error) {
    const std::size_t n = log_weights.size();
    if (n == 0)
        throw DegenerateWeightsError("smc-kernels", t_for_error, "empty weight vector");
    double m = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = log_weights[i];
        if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
            throw DegenerateWeightsError("smc-kernels", t_for_error, "non-finite weight");
        if (w > m) m = w;
    }
    if (m == kNegInf)
        throw DegenerateWeightsError("smc-kernels", t_for_error, "all weights are zero");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::exp(log_weights[i] - m);
        probs_out[i] = p;
        s += p;
    }
    const double inv = 1.0 / s;
    for (std::size_t i = 0; i < n; ++i) probs_out[i] *= inv;
    return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
    std::vector<double> probs(log_weights.size());
    normalize_log_weights_into(log_weights, probs, -1);
    return probs;
}

void AliasTable::build(std::span<const double> probs) {
    const std::size_t n = probs.size();
    prob_.resize(n);
    alias_.resize(n);
    small_.clear();
    large_.clear();
    const double scale = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        prob_[i] = probs[i] * scale;
        alias_[i] = i;
        (prob_[i] < 1.0 ? small_ : large_).push_back(i);
    }
    while (!small_.empty() && !large_.empty()) {
        const std::size_t s = small_.back();
        small_.pop_back();
        const std::size_t l = large_.back();
        alias_[s] = l;
        prob_[l] -= 1.0 - prob_[s];
        if (prob_[l] < 1.0) {
            large_.pop_back();
            small_.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : small_) prob_[i] = 1.0;
    for (std::size_t i : large_) prob_[i] = 1.0;
}

std::size_t categorical_draw(std::span<const double> weights, RngStream& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || std::isnan(w))
            throw Error("smc-kernels", "categorical draw requires nonnegative weights");
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw DegenerateWeightsError("smc-kernels", -1, "no probability mass");
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

std::vector<std::size_t> multinomial_resample(std::span<const double> probs,
                                              std::size_t n_draws, RngStream& rng) {
    for (double p : probs)
        if (p < 0.0 || std::isnan(p))
            throw Error("smc-kernels", "resampling weights must be nonnegative");
    AliasTable table;
    table.build(probs);
    std::vector<std::size_t> idx(n_draws);
    for (auto& i : idx) i = table.draw(rng);
    return idx;
}

std::vector<std::size_t> systematic_resample(std::span<const double> probs,
                                             std::size_t n_draws, RngStream& rng) {
    for (double p : probs)
        if (p < 0.0 || std::isnan(p))
            throw Error("smc-kernels", "resampling weights must be nonnegative");
    std::vector<std::size_t> idx(n_draws);
    if (n_draws == 0) return idx;
    const double step = 1.0 / static_cast<double>(n_draws);
    double point = rng.uniform() * step;
    double acc = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        while (acc + probs[j] < point && j + 1 < probs.size()) acc += probs[j++];
        idx[i] = j;
        point += step;
    }
    return idx;
}

}  // namespace pgkit
