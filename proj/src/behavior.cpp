#include "iccv/behavior.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "iccv/errors.hpp"
#include "iccv/normal.hpp"
#include "iccv/quadrature.hpp"

namespace iccv {

CostSchedule CostSchedule::constant(double c) {
    if (!(std::isfinite(c) && c >= 0.0)) {
        throw std::invalid_argument("CostSchedule::constant: cost must be finite and >= 0");
    }
    return CostSchedule(Kind::constant, c, 0.0);
}

CostSchedule CostSchedule::power_law(double c0, double epsilon) {
    if (!(std::isfinite(c0) && c0 > 0.0) || !(std::isfinite(epsilon) && epsilon > 0.0)) {
        throw std::invalid_argument("CostSchedule::power_law: requires c0 > 0 and epsilon > 0");
    }
    return CostSchedule(Kind::power_law, c0, epsilon);
}

double CostSchedule::at(int n) const {
    if (n < 1) throw std::invalid_argument("CostSchedule::at: study index must be >= 1");
    if (kind_ == Kind::constant) return c0_;
    return c0_ * std::pow(static_cast<double>(n), eps_);
}

Incentives::Incentives(double payoff_in, CostSchedule cost_in)
    : payoff(payoff_in), cost(cost_in) {
    if (!(std::isfinite(payoff) && payoff > 0.0)) {
        throw std::invalid_argument("Incentives: payoff must be finite and > 0");
    }
}

double GeneralSpec::lambda(int i) const {
    switch (lambda_kind) {
        case LambdaKind::ones:
            return 1.0;
        case LambdaKind::sqrt_index: {
            const double t1 = study_sizes.empty() ? 1.0 : study_sizes.front();
            const double ti = study_sizes.empty() ? static_cast<double>(i)
                                                  : study_sizes.at(static_cast<std::size_t>(i) - 1);
            return std::sqrt(ti / t1);
        }
        case LambdaKind::custom:
            if (static_cast<std::size_t>(i) > lambda_values.size()) {
                throw std::invalid_argument("GeneralSpec: custom lambda has no entry for study " +
                                            std::to_string(i));
            }
            return lambda_values[static_cast<std::size_t>(i) - 1];
    }
    throw std::logic_error("GeneralSpec::lambda: unreachable");
}

double GeneralSpec::omega_entry(int i, int j) const {
    if (i > j) std::swap(i, j);
    switch (omega_kind) {
        case OmegaKind::identity:
            return i == j ? 1.0 : 0.0;
        case OmegaKind::pooling: {
            const double ti = study_sizes.empty() ? static_cast<double>(i)
                                                  : study_sizes.at(static_cast<std::size_t>(i) - 1);
            const double tj = study_sizes.empty() ? static_cast<double>(j)
                                                  : study_sizes.at(static_cast<std::size_t>(j) - 1);
            return std::sqrt(ti / tj);
        }
        case OmegaKind::constant_rho:
            return i == j ? 1.0 : rho;
        case OmegaKind::custom:
            if (static_cast<std::size_t>(j) > omega_matrix.rows()) {
                throw std::invalid_argument("GeneralSpec: custom omega matrix smaller than study " +
                                            std::to_string(j));
            }
            return omega_matrix(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1);
    }
    throw std::logic_error("GeneralSpec::omega_entry: unreachable");
}

Matrix GeneralSpec::omega(int n) const {
    Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            m(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) = omega_entry(i, j);
    return m;
}

void GeneralSpec::validate(int max_n) const {
    if (!(alpha_s >= 0.0 && alpha_s <= 1.0)) {
        throw std::invalid_argument("GeneralSpec: alpha_s must lie in [0,1]");
    }
    if (!(jitter >= 0.0)) throw std::invalid_argument("GeneralSpec: jitter must be >= 0");
    if (omega_kind == OmegaKind::constant_rho && !(rho > -1.0 && rho < 1.0)) {
        throw std::invalid_argument("GeneralSpec: rho must lie in (-1, 1)");
    }
    if (omega_kind == OmegaKind::custom && !omega_matrix.is_symmetric(1e-12)) {
        throw std::invalid_argument("GeneralSpec: custom omega must be symmetric");
    }
    if (lambda_kind == LambdaKind::custom && lambda_values.empty()) {
        throw std::invalid_argument("GeneralSpec: custom lambda vector is empty");
    }
    for (double t : study_sizes) {
        if (!(t > 0.0)) throw std::invalid_argument("GeneralSpec: study sizes must be > 0");
    }
    if (max_n >= 1) {
        cholesky_lower(omega(std::min(max_n, 4)));  // early PD sanity probe
    }
}

BehaviorModel BehaviorModel::general(GeneralSpec spec) {
    spec.validate(0);
    BehaviorModel m(Kind::general);
    m.spec_ = std::move(spec);
    return m;
}

const GeneralSpec& BehaviorModel::spec() const {
    if (!spec_) throw std::logic_error("BehaviorModel::spec: not a general model");
    return *spec_;
}

const char* BehaviorModel::name() const {
    switch (kind_) {
        case Kind::baseline: return "baseline";
        case Kind::increasing_cost: return "increasing-cost";
        case Kind::learning: return "learning";
        case Kind::pooling: return "pooling";
        case Kind::general: return "general";
    }
    return "?";
}

namespace {

double tail_prob(double mean, double sd, double z, Tail tail) {
    double p = 1.0 - std_normal_cdf((z - mean) / sd);
    if (tail == Tail::two_sided) p += std_normal_cdf((-z - mean) / sd);
    return p;
}

// Subjective probability that the next pooled statistic rejects, given the
// previous one. The conditional law collapses the history to
// sqrt(n-1) X*_{n-1}: the integrand is
//   1 - Phi(sqrt(n) z - theta - sqrt(n-1) x) + Phi(-sqrt(n) z - theta - sqrt(n-1) x).
double pooling_prob(const Prior& prior, double z, int n, double x_prev, Tail tail) {
    const double shift = std::sqrt(static_cast<double>(n - 1)) * x_prev;
    const double a = std::sqrt(static_cast<double>(n)) * z - shift;
    const double b = -std::sqrt(static_cast<double>(n)) * z - shift;
    const auto integrand = [&](double theta) {
        double p = 1.0 - std_normal_cdf(a - theta);
        if (tail == Tail::two_sided) p += std_normal_cdf(b - theta);
        return p;
    };
    switch (prior.kind()) {
        case Prior::Kind::point_mass:
            return integrand(prior.theta());
        case Prior::Kind::normal: {
            const double s = std::sqrt(1.0 + prior.sigma() * prior.sigma());
            double p = 1.0 - std_normal_cdf((a - prior.mu()) / s);
            if (tail == Tail::two_sided) p += std_normal_cdf((b - prior.mu()) / s);
            return p;
        }
        case Prior::Kind::uniform:
            return adaptive_simpson(integrand, prior.lower(), prior.upper(), 1e-12) /
                   (prior.upper() - prior.lower());
    }
    throw std::logic_error("pooling_prob: unreachable");
}

// Conditional pieces of the general model at study n given m = n-1 latent
// draws: weights w = Omega_{n-1}^{-1} Omega_{12}, conditional variance, and
// the data offset r = w'x.
struct GeneralConditional {
    std::vector<double> w;
    double cond_var = 1.0;
    double offset = 0.0;
    double a_dot_lambda = 1.0;  // lambda_n - w'lambda_{1..m}
};

GeneralConditional general_conditional(const GeneralSpec& gs, const std::vector<double>& latent) {
    const int m = static_cast<int>(latent.size());
    const int n = m + 1;
    GeneralConditional gc;
    const double lambda_n = gs.lambda(n);
    if (m == 0) {
        gc.cond_var = gs.omega_entry(1, 1);
        gc.a_dot_lambda = lambda_n;
        return gc;
    }
    Matrix omega_prev(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    std::vector<double> cross(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j)
            omega_prev(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) =
                gs.omega_entry(i, j);
        cross[static_cast<std::size_t>(i) - 1] = gs.omega_entry(i, n);
    }
    const Matrix chol = cholesky_lower(omega_prev);
    gc.w = spd_solve(chol, cross);
    double qf = 0.0;
    double off = 0.0;
    double wl = 0.0;
    for (int i = 0; i < m; ++i) {
        qf += gc.w[static_cast<std::size_t>(i)] * cross[static_cast<std::size_t>(i)];
        off += gc.w[static_cast<std::size_t>(i)] * latent[static_cast<std::size_t>(i)];
        wl += gc.w[static_cast<std::size_t>(i)] * gs.lambda(i + 1);
    }
    gc.cond_var = gs.omega_entry(n, n) - qf;
    if (!(gc.cond_var > 0.0)) {
        throw NotPositiveDefiniteError(static_cast<std::size_t>(m),
                                       "general model: conditional variance not positive at study " +
                                           std::to_string(n));
    }
    gc.offset = off;
    gc.a_dot_lambda = lambda_n - wl;
    return gc;
}

// Subjective rejection probability of study n in the general model. Under a
// Gaussian belief theta_n ~ N(mean, cov), the conditional mean
// theta_{n|n-1} = a'theta_n + r is itself Gaussian, so the integral against
// the belief is a single normal tail with variance cond_var + a'cov a.
double general_prob(const GeneralSpec& gs, const std::vector<double>& latent, const Prior& prior,
                    double z, Tail tail) {
    if (prior.kind() == Prior::Kind::uniform) {
        throw UnsupportedError("general model: uniform priors are not supported");
    }
    const GeneralConditional gc = general_conditional(gs, latent);
    const int m = static_cast<int>(latent.size());

    const double prior_mu = prior.is_normal() ? prior.mu() : prior.theta();
    const double prior_sd = prior.is_normal() ? prior.sigma() : 0.0;

    const double mean_prior = prior_mu * gc.a_dot_lambda + gc.offset;
    const double var_prior = prior_sd * prior_sd * gc.a_dot_lambda * gc.a_dot_lambda;
    const double p_prior = tail_prob(mean_prior, std::sqrt(gc.cond_var + var_prior), z, tail);
    if (gs.alpha_s >= 1.0 || m == 0) return p_prior;

    double p_post = p_prior;
    if (prior.is_normal()) {
        const int n = m + 1;
        std::vector<double> mean_n(static_cast<std::size_t>(n));
        Matrix sigma_n(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            mean_n[static_cast<std::size_t>(i) - 1] = gs.lambda(i) * prior_mu;
            for (int j = 1; j <= n; ++j)
                sigma_n(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) =
                    prior_sd * prior_sd * gs.lambda(i) * gs.lambda(j);
        }
        Matrix omega_prev(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j)
                omega_prev(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) =
                    gs.omega_entry(i, j);
        const MvnPrior post = posterior_general(MvnPrior(mean_n, sigma_n), omega_prev, latent,
                                                gs.jitter > 0.0 ? std::optional<double>(gs.jitter)
                                                                : std::nullopt);
        // a = (-w, 1): mean and variance of a'theta_n under the posterior.
        double mean_post = post.mean[static_cast<std::size_t>(m)];
        for (int i = 0; i < m; ++i)
            mean_post -= gc.w[static_cast<std::size_t>(i)] * post.mean[static_cast<std::size_t>(i)];
        std::vector<double> a(static_cast<std::size_t>(n));
        for (int i = 0; i < m; ++i) a[static_cast<std::size_t>(i)] = -gc.w[static_cast<std::size_t>(i)];
        a[static_cast<std::size_t>(m)] = 1.0;
        double var_post = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                var_post += a[static_cast<std::size_t>(i)] *
                            post.cov(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                            a[static_cast<std::size_t>(j)];
        var_post = std::max(var_post, 0.0);
        p_post = tail_prob(mean_post + gc.offset, std::sqrt(gc.cond_var + var_post), z, tail);
    }
    // Point-mass beliefs are invariant under Bayes' rule, so p_post == p_prior.
    return subjective_mixture(p_prior, p_post, gs.alpha_s);
}

void check_state(const Trajectory& state) {
    if (state.latent.size() != static_cast<std::size_t>(state.n_studies)) {
        throw std::invalid_argument("trajectory state: n_studies does not match latent history");
    }
}

} // namespace

double continue_probability(const BehaviorModel& model, const Trajectory& state,
                            const Prior& prior, const Incentives& incentives, double z, Tail tail) {
    (void)incentives;
    check_state(state);
    switch (model.kind()) {
        case BehaviorModel::Kind::baseline:
        case BehaviorModel::Kind::increasing_cost:
            return rejection_prob(prior, z, tail);
        case BehaviorModel::Kind::learning: {
            const PosteriorScalar post = posterior_scalar(prior, state.latent);
            // Prop't mixture variance: next draw ~ N(theta, 1) with theta drawn
            // from the posterior, hence sd sqrt(1 + posterior variance).
            return tail_prob(post.mean, std::sqrt(1.0 + post.variance), z, tail);
        }
        case BehaviorModel::Kind::pooling: {
            const int n = state.n_studies + 1;
            const double x_prev = state.latent.empty() ? 0.0 : state.latent.back();
            return pooling_prob(prior, z, n, x_prev, tail);
        }
        case BehaviorModel::Kind::general:
            return general_prob(model.spec(), state.latent, prior, z, tail);
    }
    throw std::logic_error("continue_probability: unreachable");
}

bool continue_decision(const BehaviorModel& model, const Trajectory& state, const Prior& prior,
                       const Incentives& incentives, double z, Tail tail) {
    check_state(state);
    if (state.reported >= z && state.n_studies > 0) {
        throw std::logic_error("continue_decision: rejection already attained (reported " +
                               std::to_string(state.reported) + " >= z " + std::to_string(z) + ")");
    }
    const double p = continue_probability(model, state, prior, incentives, z, tail);
    const int n = state.n_studies + 1;
    return incentives.payoff * p - incentives.cost.at(n) >= 0.0;
}

int n_max_increasing_cost(const Prior& prior, const Incentives& incentives, double z, Tail tail) {
    if (incentives.cost.kind() != CostSchedule::Kind::power_law) {
        throw UnsupportedError(
            "n_max_increasing_cost: requires a power-law cost schedule; the constant-cost "
            "baseline has no finite study envelope (see baseline_threshold)");
    }
    const double ratio = incentives.payoff * rejection_prob(prior, z, tail) / incentives.cost.base();
    if (ratio < 1.0) return 0;
    const double bound = std::pow(ratio, 1.0 / incentives.cost.epsilon());
    if (bound >= 1e9) return 1000000000;
    return static_cast<int>(std::floor(bound));
}

double next_latent(const BehaviorModel& model, const Trajectory& state, double theta_true,
                   RandomStream& stream) {
    check_state(state);
    if (!std::isfinite(theta_true)) {
        throw std::invalid_argument("next_latent: theta_true must be finite");
    }
    switch (model.kind()) {
        case BehaviorModel::Kind::baseline:
        case BehaviorModel::Kind::increasing_cost:
        case BehaviorModel::Kind::learning:
            return theta_true + stream.next_normal();
        case BehaviorModel::Kind::pooling: {
            const int n = state.n_studies + 1;
            if (n == 1) return theta_true + stream.next_normal();
            const double nd = static_cast<double>(n);
            const double mean = std::sqrt(nd) * theta_true +
                                std::sqrt((nd - 1.0) / nd) *
                                    (state.latent.back() - std::sqrt(nd - 1.0) * theta_true);
            return mean + stream.next_normal() / std::sqrt(nd);
        }
        case BehaviorModel::Kind::general: {
            const GeneralSpec& gs = model.spec();
            const GeneralConditional gc = general_conditional(gs, state.latent);
            const int n = state.n_studies + 1;
            double mean = gs.lambda(n) * theta_true;
            for (int i = 0; i < state.n_studies; ++i) {
                mean += gc.w[static_cast<std::size_t>(i)] *
                        (state.latent[static_cast<std::size_t>(i)] - gs.lambda(i + 1) * theta_true);
            }
            return mean + std::sqrt(gc.cond_var) * stream.next_normal();
        }
    }
    throw std::logic_error("next_latent: unreachable");
}

TrajectorySimulator::TrajectorySimulator(BehaviorModel model, Prior prior, Incentives incentives,
                                         double z, Tail tail, int cap)
    : model_(std::move(model)),
      prior_(std::move(prior)),
      incentives_(std::move(incentives)),
      z_(z),
      tail_(tail),
      cap_(cap) {
    if (cap_ < 1) throw std::invalid_argument("TrajectorySimulator: cap must be >= 1");
    if (!(std::isfinite(z_) && z_ >= 0.0)) {
        throw std::invalid_argument("TrajectorySimulator: z must be finite and >= 0");
    }
    const Trajectory empty;
    // Fails fast on unsupported prior/model pairs, and caches the
    // history-independent continuation probability for the hot loop.
    static_reject_prob_ = continue_probability(model_, empty, prior_, incentives_, z_, tail_);
}

bool TrajectorySimulator::decide(const Trajectory& state) const {
    double p = static_reject_prob_;
    if (model_.kind() != BehaviorModel::Kind::baseline &&
        model_.kind() != BehaviorModel::Kind::increasing_cost && state.n_studies > 0) {
        p = continue_probability(model_, state, prior_, incentives_, z_, tail_);
    }
    return incentives_.payoff * p - incentives_.cost.at(state.n_studies + 1) >= 0.0;
}

Trajectory TrajectorySimulator::run(double theta_true, RandomStream stream) const {
    Trajectory t;
    if (t.reported >= z_) {  // z == 0: the empty report already clears the bar
        t.rejected = true;
        return t;
    }
    t.latent.reserve(8);
#ifndef NDEBUG
    double prev_profit = std::numeric_limits<double>::infinity();
#endif
    for (int n = 1;; ++n) {
        const bool go = decide(t);
#ifndef NDEBUG
        if (model_.kind() == BehaviorModel::Kind::increasing_cost) {
            const double profit = incentives_.payoff * static_reject_prob_ - incentives_.cost.at(n);
            assert(profit <= prev_profit + 1e-9 && "marginal profit must be non-increasing");
            prev_profit = profit;
        }
#endif
        if (!go) return t;
        const double x = next_latent(model_, t, theta_true, stream);
        t.latent.push_back(x);
        t.n_studies = n;
        const double stat = tail_ == Tail::two_sided ? std::fabs(x) : x;
        t.reported = (n == 1) ? stat : std::max(t.reported, stat);
        if (t.reported >= z_) {
            t.rejected = true;
            return t;
        }
        if (n == cap_) {
            // Capped only if the researcher was still willing to continue.
            t.capped = decide(t);
            return t;
        }
    }
}

Trajectory simulate_trajectory(const BehaviorModel& model, const Prior& prior,
                               const Incentives& incentives, double z, Tail tail,
                               double theta_true, int cap, RandomStream stream) {
    return TrajectorySimulator(model, prior, incentives, z, tail, cap).run(theta_true, stream);
}

} // namespace iccv
