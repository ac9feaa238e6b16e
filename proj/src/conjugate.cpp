#include "pgkit/conjugate.hpp"

#include <cmath>

namespace pgkit {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error("pg-samplers", std::string(what) + " is not finite");
}

}  // namespace

double sum_sq_transition_residuals(const SsmModel& model, const Trajectory& states) {
    if (states.empty()) throw Error("pg-samplers", "state trajectory is empty");
    double ss = 0.0;
    for (std::size_t s = 1; s < states.size(); ++s) {
        const double e = states[s] - model.mean_transition(states[s - 1], static_cast<long>(s));
        require_finite(e, "transition residual");
        ss += e * e;
    }
    return ss;
}

double sum_sq_observation_residuals(const SsmModel& model, const Trajectory& states,
                                    const ObservationSeries& obs) {
    if (states.size() != obs.size())
        throw Error("pg-samplers", "state and observation lengths differ");
    if (states.empty()) throw Error("pg-samplers", "state trajectory is empty");
    double ss = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
        const double e = obs[s] - model.mean_observation(states[s]);
        require_finite(e, "observation residual");
        ss += e * e;
    }
    return ss;
}

double sample_q_posterior(const InvGammaPrior& prior, const Trajectory& states,
                          const SsmModel& model, RngStream& rng) {
    prior.validate();
    const double ss = sum_sq_transition_residuals(model, states);
    const double shape = prior.alpha_q + 0.5 * static_cast<double>(states.size() - 1);
    const double rate = prior.beta_q + 0.5 * ss;
    return rng.inverse_gamma(shape, rate);
}

double sample_r_posterior(const InvGammaPrior& prior, const Trajectory& states,
                          const ObservationSeries& obs, const SsmModel& model,
                          RngStream& rng) {
    prior.validate();
    const double ss = sum_sq_observation_residuals(model, states, obs);
    const double shape = prior.alpha_r + 0.5 * static_cast<double>(states.size());
    const double rate = prior.beta_r + 0.5 * ss;
    return rng.inverse_gamma(shape, rate);
}

}  // namespace pgkit
