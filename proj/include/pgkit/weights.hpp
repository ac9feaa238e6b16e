#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgkit/rng.hpp"

namespace pgkit {

double log_sum_exp(std::span<const double> log_values);

// Exponentiates shifted log weights into probabilities summing to one.
// Returns log_sum_exp of the input (the quantity marginal-likelihood
// accumulation needs). Throws DegenerateWeightsError when the row has no
// usable mass or contains NaN; t_for_error is the 1-based timestep reported.
double normalize_log_weights_into(std::span<const double> log_weights,
                                  std::span<double> probs_out,
                                  long t_for_error);

std::vector<double> normalize_log_weights(std::span<const double> log_weights);

// Walker alias table for O(1) categorical draws. Probabilities must be
// normalized; build() may be called repeatedly to reuse storage.
class AliasTable {
public:
    void build(std::span<const double> probs);
    std::size_t size() const noexcept { return prob_.size(); }

    std::size_t draw(RngStream& rng) const noexcept {
        const std::size_t k = static_cast<std::size_t>(static_cast<double>(prob_.size()) * rng.uniform());
        const std::size_t i = k < prob_.size() ? k : prob_.size() - 1;
        return rng.uniform() < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
    std::vector<std::size_t> small_, large_;  // build scratch
};

// Single categorical draw from unnormalized nonnegative weights.
std::size_t categorical_draw(std::span<const double> weights, RngStream& rng);

// n_draws i.i.d. categorical draws from normalized weights.
std::vector<std::size_t> multinomial_resample(std::span<const double> probs,
                                              std::size_t n_draws, RngStream& rng);

// Systematic (stratified, single uniform) resampling from normalized weights.
std::vector<std::size_t> systematic_resample(std::span<const double> probs,
                                             std::size_t n_draws, RngStream& rng);

}  // namespace pgkit
