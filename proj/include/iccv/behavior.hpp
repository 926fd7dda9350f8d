#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iccv/linalg.hpp"
#include "iccv/posterior.hpp"
#include "iccv/prior.hpp"
#include "iccv/rng.hpp"

namespace iccv {

// Marginal cost of the n-th study: a constant c, or the power law c0 * n^eps
// (strictly increasing with c(0) = 0 and unbounded).
class CostSchedule {
public:
    enum class Kind { constant, power_law };

    static CostSchedule constant(double c);
    static CostSchedule power_law(double c0, double epsilon);

    double at(int n) const;
    Kind kind() const { return kind_; }
    double base() const { return c0_; }
    double epsilon() const { return eps_; }

private:
    CostSchedule(Kind kind, double c0, double eps) : kind_(kind), c0_(c0), eps_(eps) {}

    Kind kind_;
    double c0_;
    double eps_;
};

// Publication payoff v > 0 plus the cost schedule.
struct Incentives {
    double payoff;
    CostSchedule cost;

    Incentives(double payoff_in, CostSchedule cost_in);
    double cost_ratio(int n = 1) const { return cost.at(n) / payoff; }
};

// Configuration of the general research process: per-study mean multipliers
// lambda_i (theta_i = lambda_i * theta), a correlation generator for Omega_n,
// a sophistication weight alpha_s in [0,1] mixing prior and posterior beliefs,
// and the diagonal jitter used to invert the rank-one common-theta prior
// covariance when alpha_s < 1.
struct GeneralSpec {
    enum class LambdaKind { ones, sqrt_index, custom };
    enum class OmegaKind { identity, pooling, constant_rho, custom };

    LambdaKind lambda_kind = LambdaKind::ones;
    std::vector<double> lambda_values;  // custom lambda, 1-based study i at [i-1]

    OmegaKind omega_kind = OmegaKind::identity;
    double rho = 0.0;                      // constant_rho off-diagonal
    std::vector<double> study_sizes;       // pooling T_i; empty means T_i = i
    Matrix omega_matrix;                   // custom correlation matrix

    double alpha_s = 1.0;
    double jitter = 1e-8;

    double lambda(int i) const;            // 1-based
    double omega_entry(int i, int j) const;  // 1-based, symmetric
    Matrix omega(int n) const;
    void validate(int max_n) const;
};

// Which research process of the model family governs the latent statistics
// and the stopping rule.
class BehaviorModel {
public:
    enum class Kind { baseline, increasing_cost, learning, pooling, general };

    static BehaviorModel baseline() { return BehaviorModel(Kind::baseline); }
    static BehaviorModel increasing_cost() { return BehaviorModel(Kind::increasing_cost); }
    static BehaviorModel learning() { return BehaviorModel(Kind::learning); }
    static BehaviorModel pooling() { return BehaviorModel(Kind::pooling); }
    static BehaviorModel general(GeneralSpec spec);

    Kind kind() const { return kind_; }
    const GeneralSpec& spec() const;
    const char* name() const;

private:
    explicit BehaviorModel(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::optional<GeneralSpec> spec_;
};

// One simulated researcher run. `reported` is the running max of |X*_i|
// (two-sided) or X*_i (one-sided), 0 when no study was conducted; `capped`
// marks runs truncated by the study cap while the researcher would have
// continued (capped runs are never rejections).
struct Trajectory {
    int n_studies = 0;
    std::vector<double> latent;
    double reported = 0.0;
    bool rejected = false;
    bool capped = false;
};

// Researcher's continuation rule for the next study given the trajectory so
// far: conduct study n = state.n_studies + 1 iff
//   payoff * P_subjective(next statistic rejects at z) - c(n) >= 0.
// The subjective probability follows the model: the prior-integrated
// rejection probability (baseline / increasing cost), its posterior version
// (learning), the data-accumulation conditional (pooling), or the general
// Gaussian conditional with the alpha_s prior/posterior mixture.
// Preconditions: state.reported < z, and the prior kind is supported by the
// model (learning and the general posterior path require a normal prior).
bool continue_decision(const BehaviorModel& model, const Trajectory& state, const Prior& prior,
                       const Incentives& incentives, double z, Tail tail);

// The subjective probability used by continue_decision, exposed for tests
// and diagnostics.
double continue_probability(const BehaviorModel& model, const Trajectory& state,
                            const Prior& prior, const Incentives& incentives, double z, Tail tail);

// Deterministic study-count envelope under an increasing (power-law) cost:
// floor((v R(z) / c0)^(1/eps)), 0 when the first study is already
// unprofitable. Throws UnsupportedError for constant cost.
int n_max_increasing_cost(const Prior& prior, const Incentives& incentives, double z, Tail tail);

// Draw the next latent statistic from the model's true conditional law given
// the trajectory so far; consumes exactly one normal from the stream.
double next_latent(const BehaviorModel& model, const Trajectory& state, double theta_true,
                   RandomStream& stream);

// Reusable simulator for one (model, prior, incentives, z, tail, cap)
// configuration; run() is const and safe to call concurrently with
// per-replicate substreams.
class TrajectorySimulator {
public:
    TrajectorySimulator(BehaviorModel model, Prior prior, Incentives incentives, double z,
                        Tail tail, int cap);

    Trajectory run(double theta_true, RandomStream stream) const;

    double z() const { return z_; }

private:
    bool decide(const Trajectory& state) const;

    BehaviorModel model_;
    Prior prior_;
    Incentives incentives_;
    double z_;
    Tail tail_;
    int cap_;
    double static_reject_prob_ = 0.0;  // history-independent models only
};

// Single-shot convenience wrapper around TrajectorySimulator.
Trajectory simulate_trajectory(const BehaviorModel& model, const Prior& prior,
                               const Incentives& incentives, double z, Tail tail,
                               double theta_true, int cap, RandomStream stream);

} // namespace iccv
