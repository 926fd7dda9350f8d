#include "iccv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "iccv/errors.hpp"
#include "iccv/normal.hpp"

namespace iccv {

namespace {

struct Tally {
    std::uint64_t rejections = 0;
    std::uint64_t cap_hits = 0;
    std::uint64_t studies = 0;
};

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Replicate r always uses the substream (seed, {r}), so tallies are exact
// integer sums independent of the worker layout.
Tally run_replicates(const TrajectorySimulator& sim, double theta_true, long reps,
                     std::uint64_t seed, int workers) {
    workers = std::min<long>(resolve_workers(workers), reps);
    const auto worker_fn = [&](long begin, long end, Tally& out) {
        Tally local;
        for (long r = begin; r < end; ++r) {
            const Trajectory t =
                sim.run(theta_true, RandomStream(seed, {static_cast<std::uint64_t>(r)}));
            local.rejections += t.rejected ? 1 : 0;
            local.cap_hits += t.capped ? 1 : 0;
            local.studies += static_cast<std::uint64_t>(t.n_studies);
        }
        out = local;
    };

    if (workers <= 1) {
        Tally t;
        worker_fn(0, reps, t);
        return t;
    }

    std::vector<Tally> parts(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    const long chunk = (reps + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long begin = static_cast<long>(w) * chunk;
        const long end = std::min(reps, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            try {
                worker_fn(begin, end, parts[static_cast<std::size_t>(w)]);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    Tally total;
    for (const Tally& p : parts) {
        total.rejections += p.rejections;
        total.cap_hits += p.cap_hits;
        total.studies += p.studies;
    }
    return total;
}

SizeEstimate to_estimate(const Tally& t, long reps) {
    SizeEstimate e;
    e.reps = reps;
    e.size = static_cast<double>(t.rejections) / static_cast<double>(reps);
    e.std_error = std::sqrt(e.size * (1.0 - e.size) / static_cast<double>(reps));
    e.cap_hit_rate = static_cast<double>(t.cap_hits) / static_cast<double>(reps);
    return e;
}

void check_reps(long reps) {
    if (reps < 1000) {
        throw std::invalid_argument("Monte Carlo estimates require reps >= 1000, got " +
                                    std::to_string(reps));
    }
}

} // namespace

double classical_quantile(double alpha, Tail tail) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("classical_quantile: alpha must lie in (0,1)");
    }
    return std_normal_quantile(tail == Tail::two_sided ? 1.0 - alpha / 2.0 : 1.0 - alpha);
}

SizeEstimate estimate_size(const BehaviorModel& model, const Prior& prior,
                           const Incentives& incentives, double z, Tail tail, long reps,
                           std::uint64_t seed, int cap, int workers) {
    check_reps(reps);
    const TrajectorySimulator sim(model, prior, incentives, z, tail, cap);
    return to_estimate(run_replicates(sim, 0.0, reps, seed, workers), reps);
}

SizeEstimate estimate_power(const BehaviorModel& model, const Prior& prior,
                            const Incentives& incentives, double z, Tail tail, double theta_true,
                            long reps, std::uint64_t seed, int cap, int workers) {
    check_reps(reps);
    const TrajectorySimulator sim(model, prior, incentives, z, tail, cap);
    return to_estimate(run_replicates(sim, theta_true, reps, seed, workers), reps);
}

double size_closed_form_iid(double z, int n, Tail tail) {
    if (n < 0) throw std::invalid_argument("size_closed_form_iid: N must be >= 0");
    if (n == 0) return 0.0;
    const double keep = tail == Tail::two_sided ? std_normal_cdf(z) - std_normal_cdf(-z)
                                                : std_normal_cdf(z);
    return 1.0 - std::pow(keep, n);
}

double mean_num_studies(const BehaviorModel& model, const Prior& prior,
                        const Incentives& incentives, double z, Tail tail, long reps,
                        std::uint64_t seed, int cap, int workers) {
    check_reps(reps);
    const TrajectorySimulator sim(model, prior, incentives, z, tail, cap);
    const Tally t = run_replicates(sim, 0.0, reps, seed, workers);
    return static_cast<double>(t.studies) / static_cast<double>(reps);
}

ICCVResult find_iccv(const BehaviorModel& model, const Prior& prior, const Incentives& incentives,
                     Tail tail, double alpha, long reps, std::uint64_t seed, const GridSpec& grid,
                     int cap, int workers) {
    check_reps(reps);
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::invalid_argument("find_iccv: alpha must lie in (0, 0.5)");
    }
    if (!(grid.step > 0.0)) throw std::invalid_argument("find_iccv: grid step must be > 0");

    // Size can jump where the induced study count changes, so the search walks
    // a grid under common random numbers instead of root-finding. The grid
    // never starts below the classical single-study quantile.
    const double lo = std::max(grid.lo, classical_quantile(alpha, tail));
    if (grid.hi < lo) {
        throw std::invalid_argument("find_iccv: grid hi " + std::to_string(grid.hi) +
                                    " lies below effective lo " + std::to_string(lo));
    }
    const long n_points = static_cast<long>(std::floor((grid.hi - lo) / grid.step + 1e-9)) + 1;

    std::vector<Tally> tallies(static_cast<std::size_t>(n_points));
    std::vector<double> sizes(static_cast<std::size_t>(n_points));
    double min_size = 1.0;
    for (long j = 0; j < n_points; ++j) {
        const double z = lo + static_cast<double>(j) * grid.step;
        const TrajectorySimulator sim(model, prior, incentives, z, tail, cap);
        tallies[static_cast<std::size_t>(j)] = run_replicates(sim, 0.0, reps, seed, workers);
        sizes[static_cast<std::size_t>(j)] =
            static_cast<double>(tallies[static_cast<std::size_t>(j)].rejections) /
            static_cast<double>(reps);
        min_size = std::min(min_size, sizes[static_cast<std::size_t>(j)]);
    }

    // Conservative plateau rule: pick the smallest grid point from which the
    // estimated size stays <= alpha all the way to the top of the grid.
    long pick = -1;
    for (long j = n_points - 1; j >= 0; --j) {
        if (sizes[static_cast<std::size_t>(j)] <= alpha) {
            pick = j;
        } else {
            break;
        }
    }
    if (pick < 0) {
        throw SearchFailureError(min_size, "find_iccv: no grid point controls size at alpha = " +
                                               std::to_string(alpha) +
                                               "; minimal achieved size " +
                                               std::to_string(min_size));
    }

    ICCVResult result;
    result.z_star = lo + static_cast<double>(pick) * grid.step;
    result.size_at_z = to_estimate(tallies[static_cast<std::size_t>(pick)], reps);
    result.grid_step = grid.step;
    result.mean_studies = static_cast<double>(tallies[static_cast<std::size_t>(pick)].studies) /
                          static_cast<double>(reps);
    result.nonzero_power =
        rejection_prob(prior, result.z_star, tail) >= incentives.cost_ratio(1);
    return result;
}

double baseline_threshold(const Prior& prior, const Incentives& incentives, Tail tail) {
    if (incentives.cost.kind() != CostSchedule::Kind::constant) {
        throw UnsupportedError("baseline_threshold: defined for the constant-cost baseline only");
    }
    const double ratio = incentives.cost_ratio(1);
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("baseline_threshold: c/v must lie in (0,1), got " +
                                    std::to_string(ratio));
    }
    if (ratio >= rejection_prob(prior, 0.0, tail)) {
        throw NoThresholdError(
            "baseline_threshold: research is never profitable (c/v >= rejection probability at "
            "z = 0)");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (rejection_prob(prior, hi, tail) >= ratio) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("baseline_threshold: bracket expansion failed");
    }
    // rejection_prob is strictly decreasing, so plain bisection converges.
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (rejection_prob(prior, mid, tail) >= ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace iccv
