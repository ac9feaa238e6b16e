#pragma once

#include "pgkit/model.hpp"
#include "pgkit/rng.hpp"

namespace pgkit {

// Independent inverse-gamma priors on the two noise variances.
struct InvGammaPrior {
    double alpha_q = 0.01;
    double beta_q = 0.01;
    double alpha_r = 0.01;
    double beta_r = 0.01;

    void validate() const {
        if (!(alpha_q > 0.0) || !(beta_q > 0.0) || !(alpha_r > 0.0) || !(beta_r > 0.0))
            throw Error("pg-samplers", "inverse-gamma prior parameters must be positive");
    }
};

// Sum over t=2..T of (x_t - f(x_{t-1}, t-1))^2.
double sum_sq_transition_residuals(const SsmModel& model, const Trajectory& states);

// Sum over t=1..T of (y_t - g(x_t))^2.
double sum_sq_observation_residuals(const SsmModel& model, const Trajectory& states,
                                    const ObservationSeries& obs);

// Gibbs draw Q | x_{1:T} ~ InvGamma(alpha_q + (T-1)/2, beta_q + SS_x/2).
double sample_q_posterior(const InvGammaPrior& prior, const Trajectory& states,
                          const SsmModel& model, RngStream& rng);

// Gibbs draw R | x_{1:T}, y_{1:T} ~ InvGamma(alpha_r + T/2, beta_r + SS_y/2).
double sample_r_posterior(const InvGammaPrior& prior, const Trajectory& states,
                          const ObservationSeries& obs, const SsmModel& model,
                          RngStream& rng);

}  // namespace pgkit
