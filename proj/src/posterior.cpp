#include "iccv/posterior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "iccv/errors.hpp"

namespace iccv {

PosteriorScalar posterior_scalar(const Prior& prior, std::span<const double> observations) {
    if (!prior.is_normal()) {
        throw UnsupportedError("posterior_scalar: conjugate updating requires a normal prior, got " +
                               prior.describe());
    }
    for (double x : observations) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("posterior_scalar: non-finite observation");
        }
    }
    const double s2 = prior.sigma() * prior.sigma();
    const double m = static_cast<double>(observations.size());
    double sum = 0.0;
    for (double x : observations) sum += x;
    const double denom = m * s2 + 1.0;
    return PosteriorScalar{(s2 * sum + prior.mu()) / denom, s2 / denom};
}

MvnPrior::MvnPrior(std::vector<double> mean_in, Matrix cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw std::invalid_argument("MvnPrior: mean/cov dimension mismatch");
    }
    if (!cov.is_symmetric(1e-12)) {
        throw std::invalid_argument("MvnPrior: covariance not symmetric within 1e-12");
    }
}

MvnPrior posterior_general(const MvnPrior& prior, const Matrix& omega_prev,
                           std::span<const double> observations, std::optional<double> jitter) {
    const std::size_t n = prior.dim();
    const std::size_t m = observations.size();
    if (m + 1 != n) {
        throw std::invalid_argument("posterior_general: prior over theta_n must have dimension " +
                                    std::to_string(m + 1) + " for " + std::to_string(m) +
                                    " observations, got " + std::to_string(n));
    }
    if (omega_prev.rows() != m || omega_prev.cols() != m) {
        throw std::invalid_argument("posterior_general: omega_prev must be " + std::to_string(m) +
                                    "x" + std::to_string(m));
    }
    if (m == 0) return prior;  // the zero-padded information block vanishes

    Matrix sigma = prior.cov;
    if (jitter) {
        for (std::size_t i = 0; i < n; ++i) sigma(i, i) += *jitter;
    }
    Matrix sigma_chol;
    try {
        sigma_chol = cholesky_lower(sigma);
    } catch (const NotPositiveDefiniteError& e) {
        throw SingularPriorError(
            "posterior_general: prior covariance is singular (pivot " + std::to_string(e.index()) +
            "); pass a diagonal jitter (e.g. 1e-8) to regularize explicitly");
    }
    const Matrix sigma_inv = spd_inverse(sigma_chol);
    const Matrix omega_inv = spd_inverse(cholesky_lower(omega_prev));

    // Precision form: A = Omega~^{-1} + Sigma^{-1}, b = Omega~^{-1} x~ + Sigma^{-1} mu.
    Matrix a = sigma_inv;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) += omega_inv(i, j);

    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += omega_inv(i, j) * observations[j];
        b[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += sigma_inv(i, j) * prior.mean[j];
        b[i] += s;
    }

    const Matrix a_chol = cholesky_lower(a);
    return MvnPrior(spd_solve(a_chol, b), spd_inverse(a_chol));
}

} // namespace iccv
