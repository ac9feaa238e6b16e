#include "pgkit/collapsed.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "pgkit/errors.hpp"
#include "pgkit/weights.hpp"

namespace pgkit {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::size_t draw_from_probs(std::span<const double> probs, RngStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

// lgamma(a + 1/2) - lgamma(a). The direct difference loses precision once
// lgamma itself is large, so switch to a Stirling expansion; the shared shape
// hyperparameter is identical across a step's particles, so memoize the last
// argument.
double lgamma_half_diff(double a) {
    thread_local double last_a = -1.0;
    thread_local double last_v = 0.0;
    if (a == last_a) return last_v;
    double v;
    if (a < 8192.0) {
        v = std::lgamma(a + 0.5) - std::lgamma(a);
    } else {
        v = a * std::log1p(0.5 / a) + 0.5 * std::log(a) - 0.5 +
            (1.0 / 12.0) * (1.0 / (a + 0.5) - 1.0 / a);
    }
    last_a = a;
    last_v = v;
    return v;
}

// One scaled Student-t log-density factor of the predictive, without its
// (2 pi)^{-1/2} share: b is half the squared residual.
double t_core(double alpha, double beta, double b) {
    return lgamma_half_diff(alpha) - alpha * std::log1p(b / beta) - 0.5 * std::log(beta + b);
}

// The non-throwing update used inside the sweep; callers deal with any
// out-of-domain result themselves.
ConjugateState advance_state(const ConjugateModel& conj, const ConjugateState& prev, double x,
                             double y, double xp, long t) {
    const auto sv = conj.sufficient_stats(x, y, xp, t);
    const auto rv = conj.penalty_stats(x, y, xp, t);
    ConjugateState next = prev;
    next.chi[0] += sv[0];
    next.chi[1] += sv[1];
    next.nu[0] += rv[0];
    next.nu[1] += rv[1];
    return next;
}

}  // namespace

double ConjugateModel::predictive_log_marginal(double x_t, double y_t, double x_prev, long t,
                                               const ConjugateState& state) const {
    const ConjugateState next = update_hyperparams(*this, state, x_t, y_t, x_prev, t);
    return log_base_measure(t) + log_normalizer(state) - log_normalizer(next);
}

GaussianVarianceConjugate::GaussianVarianceConjugate(const SsmModel& model,
                                                     const InvGammaPrior& prior)
    : model_(&model), prior_(prior) {
    prior_.validate();
}

ConjugateState GaussianVarianceConjugate::prior_state() const {
    ConjugateState s;
    s.chi = {prior_.beta_q, prior_.beta_r};
    s.nu = {prior_.alpha_q, prior_.alpha_r};
    return s;
}

std::array<double, 2> GaussianVarianceConjugate::sufficient_stats(double x_t, double y_t,
                                                                  double x_prev, long t) const {
    const double ey = y_t - model_->mean_observation(x_t);
    if (t <= 1) return {0.0, 0.5 * ey * ey};
    const double ex = x_t - model_->mean_transition(x_prev, t - 1);
    return {0.5 * ex * ex, 0.5 * ey * ey};
}

std::array<double, 2> GaussianVarianceConjugate::penalty_stats(double, double, double,
                                                               long t) const {
    if (t <= 1) return {0.0, 0.5};
    return {0.5, 0.5};
}

double GaussianVarianceConjugate::log_base_measure(long t) const {
    return t <= 1 ? -0.5 * kLog2Pi : -kLog2Pi;
}

double GaussianVarianceConjugate::log_normalizer(const ConjugateState& s) const {
    return s.nu[0] * std::log(s.chi[0]) - std::lgamma(s.nu[0]) + s.nu[1] * std::log(s.chi[1]) -
           std::lgamma(s.nu[1]);
}

bool GaussianVarianceConjugate::state_in_domain(const ConjugateState& s) const {
    return std::isfinite(s.chi[0]) && std::isfinite(s.chi[1]) && std::isfinite(s.nu[0]) &&
           std::isfinite(s.nu[1]) && s.chi[0] > 0.0 && s.chi[1] > 0.0 && s.nu[0] > 0.0 &&
           s.nu[1] > 0.0;
}

NoiseParams GaussianVarianceConjugate::posterior_draw(const ConjugateState& s,
                                                      RngStream& rng) const {
    if (!state_in_domain(s))
        throw Error("collapsed-pg", "hyperparameters outside the conjugate domain");
    const double q = rng.inverse_gamma(s.nu[0], s.chi[0]);
    const double r = rng.inverse_gamma(s.nu[1], s.chi[1]);
    return NoiseParams(q, r);
}

double GaussianVarianceConjugate::propose_transition(double x_prev, long t,
                                                     const ConjugateState& s,
                                                     RngStream& rng) const {
    const double mean = model_->mean_transition(x_prev, t - 1);
    const double scale = std::sqrt(s.chi[0] / s.nu[0]);
    return mean + scale * rng.student_t(2.0 * s.nu[0]);
}

double GaussianVarianceConjugate::obs_predictive_log(double y_t, double x_t,
                                                     const ConjugateState& s, long) const {
    const double e = y_t - model_->mean_observation(x_t);
    return -0.5 * kLog2Pi + t_core(s.nu[1], s.chi[1], 0.5 * e * e);
}

double GaussianVarianceConjugate::predictive_log_marginal(double x_t, double y_t, double x_prev,
                                                          long t,
                                                          const ConjugateState& s) const {
    const double ey = y_t - model_->mean_observation(x_t);
    double lp = log_base_measure(t) + t_core(s.nu[1], s.chi[1], 0.5 * ey * ey);
    if (t > 1) {
        const double ex = x_t - model_->mean_transition(x_prev, t - 1);
        lp += t_core(s.nu[0], s.chi[0], 0.5 * ex * ex);
    }
    return lp;
}

ConjugateState update_hyperparams(const ConjugateModel& conj, const ConjugateState& state,
                                  double x_t, double y_t, double x_prev, long t) {
    const ConjugateState next = advance_state(conj, state, x_t, y_t, x_prev, t);
    if (!conj.state_in_domain(next))
        throw Error("collapsed-pg", "hyperparameter update left the normalizer's domain");
    return next;
}

ConjugateState fold_path(const ConjugateModel& conj, const Trajectory& states,
                         const ObservationSeries& obs) {
    if (states.size() != obs.size())
        throw Error("collapsed-pg", "state and observation lengths differ");
    if (states.empty()) throw Error("collapsed-pg", "state trajectory is empty");
    ConjugateState st = conj.prior_state();
    for (std::size_t k = 0; k < states.size(); ++k)
        st = update_hyperparams(conj, st, states[k], obs[k], k > 0 ? states[k - 1] : 0.0,
                                static_cast<long>(k) + 1);
    return st;
}

SweepResult mcsmc(const SsmModel& model, const ConjugateModel& conj,
                  const ObservationSeries& obs, const Trajectory& reference, std::size_t N,
                  RngStream& rng, const SmcOptions& opts, McsmcSystem* out_system) {
    const std::size_t T = obs.size();
    if (T == 0) throw Error("collapsed-pg", "empty observation series");
    if (N < 2) throw Error("collapsed-pg", "conditional sweep needs N >= 2");
    if (reference.size() != T)
        throw Error("collapsed-pg", "reference length does not match observations");

    McsmcSystem local;
    McsmcSystem& sys = out_system ? *out_system : local;
    ParticleSystem& ps = sys.ps;
    ps.resize(T, N);
    sys.hyper.resize(T * N);

    std::vector<double> probs(N);
    std::vector<std::size_t> sys_idx;
    AliasTable alias;

    const std::size_t pin = N - 1;
    const double log_n = std::log(static_cast<double>(N));
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double logz = 0.0;

    const ConjugateState prior = conj.prior_state();

    {
        const double y = obs[0];
        for (std::size_t i = 0; i < N; ++i) {
            const double x = i == pin ? reference[0] : model.sample_initial(rng);
            ps.particle(0, i) = x;
            ps.log_weight(0, i) = conj.obs_predictive_log(y, x, prior, 1);
            sys.state(0, i) = advance_state(conj, prior, x, y, 0.0, 1);
        }
        logz += normalize_log_weights_into(ps.weight_row(0), probs, 1) - log_n;
    }

    for (std::size_t s = 1; s < T; ++s) {
        const std::size_t n_free = N - 1;
        if (opts.resampling == Resampling::multinomial) {
            alias.build(probs);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(s, i) = static_cast<int>(alias.draw(rng));
        } else {
            sys_idx = systematic_resample(probs, n_free, rng);
            for (std::size_t i = 0; i < n_free; ++i)
                ps.ancestor(s, i) = static_cast<int>(sys_idx[i]);
        }
        ps.ancestor(s, pin) = static_cast<int>(pin);

        const double y = obs[s];
        const long t = static_cast<long>(s) + 1;
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t anc = static_cast<std::size_t>(ps.ancestor(s, i));
            const double xp = ps.particle(s - 1, anc);
            const ConjugateState& prev = sys.state(s - 1, anc);
            double x;
            bool dead = false;
            if (i == pin) {
                x = reference[s];
            } else {
                x = conj.propose_transition(xp, t, prev, rng);
                // A heavy-tailed proposal can overflow; keep the stored value
                // finite (its ancestor's) so lineage replay stays exact, and
                // make sure the particle can never be selected.
                if (!std::isfinite(x)) {
                    x = xp;
                    dead = true;
                }
            }
            ps.particle(s, i) = x;
            ps.log_weight(s, i) = dead ? neg_inf : conj.obs_predictive_log(y, x, prev, t);
            sys.state(s, i) = advance_state(conj, prev, x, y, xp, t);
        }
        logz += normalize_log_weights_into(ps.weight_row(s), probs, t) - log_n;
    }

    SweepResult result;
    result.chosen_index = draw_from_probs(probs, rng);
    result.sampled_path = ps.trace_lineage(result.chosen_index);
    result.log_marginal = logz;
    return result;
}

Trace collapsed_pg_run(const SsmModel& model, const ConjugateModel& conj,
                       const ObservationSeries& obs, std::size_t N, std::size_t M,
                       const Trajectory& init_path, RngStream& rng,
                       const CollapsedPgOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (M < 1) throw Error("collapsed-pg", "iteration count M must be >= 1");
    if (N < 2) throw Error("collapsed-pg", "conditional sweeps need N >= 2");
    if (obs.empty()) throw Error("collapsed-pg", "observation series is empty");
    if (init_path.size() != obs.size())
        throw Error("collapsed-pg", "initial path length does not match observations");

    Trace trace;
    trace.q.reserve(M);
    trace.r.reserve(M);
    trace.meta.N = N;
    trace.meta.M = M;
    trace.meta.T = obs.size();
    trace.meta.seed = rng.key();
    trace.meta.sampler_name = "collapsed_pg";

    Trajectory path = init_path;
    double q = 0.0;
    double r = 0.0;

    const auto draw_theta = [&]() {
        const NoiseParams th = conj.posterior_draw(fold_path(conj, path, obs), rng);
        q = th.q;
        r = th.r;
    };
    const auto record = [&](std::size_t iter) {
        trace.q.push_back(q);
        trace.r.push_back(r);
        if (opts.state_thin > 0 && (iter - 1) % opts.state_thin == 0) {
            trace.states.push_back(path);
            trace.state_iters.push_back(iter);
        }
    };

    draw_theta();
    record(1);

    McsmcSystem workspace;
    for (std::size_t m = 2; m <= M; ++m) {
        draw_theta();
        SweepResult sweep = mcsmc(model, conj, obs, path, N, rng, opts.smc, &workspace);
        path = std::move(sweep.sampled_path);
        record(m);
    }

    trace.meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace pgkit
