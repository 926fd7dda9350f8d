#pragma once

#include <cstdint>

#include "iccv/behavior.hpp"
#include "iccv/prior.hpp"

namespace iccv {

// Monte Carlo rejection frequency with its binomial standard error. Capped
// trajectories count as non-rejections and are reported via cap_hit_rate.
struct SizeEstimate {
    double size = 0.0;
    double std_error = 0.0;
    long reps = 0;
    double cap_hit_rate = 0.0;
};

struct GridSpec {
    double lo = 1.645;
    double hi = 6.0;
    double step = 0.005;
};

// Outcome of the incentive-compatible critical value search.
struct ICCVResult {
    double z_star = 0.0;
    SizeEstimate size_at_z;
    double grid_step = 0.0;
    bool nonzero_power = false;
    double mean_studies = 0.0;
};

inline constexpr int kDefaultCap = 10000;

// Classical single-study critical value for (alpha, tail).
double classical_quantile(double alpha, Tail tail);

// Rejection frequency under H0 (theta = 0) across `reps` simulated
// trajectories with per-replicate substreams of `seed`. Bit-reproducible for
// a fixed seed regardless of `workers` (0 = hardware concurrency).
SizeEstimate estimate_size(const BehaviorModel& model, const Prior& prior,
                           const Incentives& incentives, double z, Tail tail, long reps,
                           std::uint64_t seed, int cap = kDefaultCap, int workers = 0);

// Rejection frequency at a fixed true effect; theta_true = 0 reproduces
// estimate_size for the same seed.
SizeEstimate estimate_power(const BehaviorModel& model, const Prior& prior,
                            const Incentives& incentives, double z, Tail tail, double theta_true,
                            long reps, std::uint64_t seed, int cap = kDefaultCap, int workers = 0);

// Exact size of max-of-N iid testing: 1 - (Phi(z) - Phi(-z))^N two-sided,
// 1 - Phi(z)^N one-sided, 0 for N = 0.
double size_closed_form_iid(double z, int n, Tail tail);

// Mean number of studies over H0 trajectories.
double mean_num_studies(const BehaviorModel& model, const Prior& prior,
                        const Incentives& incentives, double z, Tail tail, long reps,
                        std::uint64_t seed, int cap = kDefaultCap, int workers = 0);

// Smallest grid point whose estimated size is <= alpha at that point and at
// every larger grid point (conservative plateau rule), evaluated with common
// random numbers across the grid. The effective grid starts at
// max(grid.lo, classical quantile). Throws SearchFailureError (carrying the
// minimal achieved size) when no grid point qualifies.
ICCVResult find_iccv(const BehaviorModel& model, const Prior& prior, const Incentives& incentives,
                     Tail tail, double alpha, long reps, std::uint64_t seed,
                     const GridSpec& grid = GridSpec{}, int cap = kDefaultCap, int workers = 0);

// Boundary CV of the constant-cost baseline: the z solving
// rejection_prob(prior, z, tail) = c/v, by bisection to 1e-8. Below it the
// researcher never stops voluntarily; above it research never starts. Throws
// NoThresholdError when research is unprofitable even at z = 0.
double baseline_threshold(const Prior& prior, const Incentives& incentives, Tail tail);

} // namespace iccv
