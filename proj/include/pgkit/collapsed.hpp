#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pgkit/conjugate.hpp"
#include "pgkit/model.hpp"
#include "pgkit/particle_system.hpp"
#include "pgkit/rng.hpp"
#include "pgkit/smc.hpp"
#include "pgkit/trace.hpp"

namespace pgkit {

// Conjugate hyperparameters carried along a particle lineage. chi accumulates
// the natural statistics, nu the counts. The shipped sufficient-statistic
// dimension is two: one slot per unknown noise variance, (Q-part, R-part).
struct ConjugateState {
    std::array<double, 2> chi{0.0, 0.0};
    std::array<double, 2> nu{0.0, 0.0};

    bool operator==(const ConjugateState&) const = default;
};

// A prior family conjugate to the model's complete-data likelihood, exposed
// through the pieces the marginalized sweep needs. Times are 1-based and name
// the destination state, matching SsmModel::mean_transition's convention of
// receiving t-1. At t = 1 only the observation component applies: the initial
// state law carries no unknown parameter.
class ConjugateModel {
public:
    virtual ~ConjugateModel() = default;

    virtual ConjugateState prior_state() const = 0;
    virtual std::array<double, 2> sufficient_stats(double x_t, double y_t, double x_prev,
                                                   long t) const = 0;
    virtual std::array<double, 2> penalty_stats(double x_t, double y_t, double x_prev,
                                                long t) const = 0;
    virtual double log_base_measure(long t) const = 0;
    virtual double log_normalizer(const ConjugateState& state) const = 0;
    virtual bool state_in_domain(const ConjugateState& state) const = 0;
    virtual NoiseParams posterior_draw(const ConjugateState& state, RngStream& rng) const = 0;

    // One draw from the parameter-marginal transition p(x_t | x_prev, state).
    virtual double propose_transition(double x_prev, long t, const ConjugateState& state,
                                      RngStream& rng) const = 0;
    // log p(y_t | x_t, state): the observation factor of the predictive.
    virtual double obs_predictive_log(double y_t, double x_t, const ConjugateState& state,
                                      long t) const = 0;

    // log p(x_t, y_t | lineage) via the normalizer ratio; the concrete class
    // may override with an algebraically equal but better-conditioned form.
    virtual double predictive_log_marginal(double x_t, double y_t, double x_prev, long t,
                                           const ConjugateState& state) const;
};

// Unknown (Q, R) under independent inverse-gamma priors with Gaussian
// residual statistics: chi = (beta_q, beta_r), nu = (alpha_q, alpha_r).
// Predictives are products of scaled Student-t densities; the proposal is the
// marginal transition t_{2 alpha_q}(mean_transition, sqrt(beta_q/alpha_q)).
class GaussianVarianceConjugate final : public ConjugateModel {
public:
    GaussianVarianceConjugate(const SsmModel& model, const InvGammaPrior& prior);

    ConjugateState prior_state() const override;
    std::array<double, 2> sufficient_stats(double x_t, double y_t, double x_prev,
                                           long t) const override;
    std::array<double, 2> penalty_stats(double x_t, double y_t, double x_prev,
                                        long t) const override;
    double log_base_measure(long t) const override;
    double log_normalizer(const ConjugateState& state) const override;
    bool state_in_domain(const ConjugateState& state) const override;
    NoiseParams posterior_draw(const ConjugateState& state, RngStream& rng) const override;
    double propose_transition(double x_prev, long t, const ConjugateState& state,
                              RngStream& rng) const override;
    double obs_predictive_log(double y_t, double x_t, const ConjugateState& state,
                              long t) const override;
    double predictive_log_marginal(double x_t, double y_t, double x_prev, long t,
                                   const ConjugateState& state) const override;

private:
    const SsmModel* model_;
    InvGammaPrior prior_;
};

// chi + s_t, nu + r_t; throws when the result leaves the normalizer's domain.
ConjugateState update_hyperparams(const ConjugateModel& conj, const ConjugateState& state,
                                  double x_t, double y_t, double x_prev, long t);

// Hyperparameters after folding a whole path against its observations.
ConjugateState fold_path(const ConjugateModel& conj, const Trajectory& states,
                         const ObservationSeries& obs);

// Dense record of a marginalized sweep: the particle system plus each
// particle's post-update hyperparameters, row-major like ParticleSystem.
struct McsmcSystem {
    ParticleSystem ps;
    std::vector<ConjugateState> hyper;

    ConjugateState& state(std::size_t t, std::size_t i) { return hyper[t * ps.N + i]; }
    const ConjugateState& state(std::size_t t, std::size_t i) const {
        return hyper[t * ps.N + i];
    }
};

// Marginalized conditional SMC: csmc with the parameters integrated out.
// Each particle carries its lineage's ConjugateState (copied with the
// ancestor on resampling); proposals come from the marginal transition and
// weights from the observation factor of the predictive. The reference is
// pinned at the last index. A non-finite proposal is replaced by its
// ancestor's value with weight zero so every stored quantity stays
// replayable.
SweepResult mcsmc(const SsmModel& model, const ConjugateModel& conj,
                  const ObservationSeries& obs, const Trajectory& reference, std::size_t N,
                  RngStream& rng, const SmcOptions& opts = {}, McsmcSystem* out_system = nullptr);

struct CollapsedPgOptions {
    std::size_t state_thin = 1;
    SmcOptions smc{};
};

// Collapsed particle Gibbs: per iteration, draw theta from the conjugate
// posterior of the current path (recorded in the trace), then refresh the
// path with one mcsmc sweep. The sweep itself never sees theta.
Trace collapsed_pg_run(const SsmModel& model, const ConjugateModel& conj,
                       const ObservationSeries& obs, std::size_t N, std::size_t M,
                       const Trajectory& init_path, RngStream& rng,
                       const CollapsedPgOptions& opts = {});

}  // namespace pgkit
