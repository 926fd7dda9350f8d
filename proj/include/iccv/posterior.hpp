#pragma once

#include <optional>
#include <span>
#include <vector>

#include "iccv/linalg.hpp"
#include "iccv/prior.hpp"

namespace iccv {

// Conjugate posterior over the scalar effect after m = n-1 unit-variance
// observations with a normal(mu, sigma) prior:
//   mean     = (sigma^2 sum(x) + mu) / (m sigma^2 + 1)
//   variance = sigma^2 / (m sigma^2 + 1)
struct PosteriorScalar {
    double mean = 0.0;
    double variance = 0.0;
};

// Throws UnsupportedError for non-normal priors; an empty observation list
// returns the prior moments unchanged.
PosteriorScalar posterior_scalar(const Prior& prior, std::span<const double> observations);

// Multivariate normal belief over the mean vector of the latent statistics.
struct MvnPrior {
    std::vector<double> mean;
    Matrix cov;

    MvnPrior(std::vector<double> mean_in, Matrix cov_in);
    std::size_t dim() const { return mean.size(); }
};

// Posterior over theta_n after observing the first n-1 latent statistics:
//   cov  = (Omega~^{-1} + Sigma^{-1})^{-1}
//   mean = cov (Omega~^{-1} x~ + Sigma^{-1} mu)
// where Omega~^{-1} is omega_prev^{-1} zero-padded to n x n and x~ the
// observations padded with one trailing zero. `jitter`, when supplied, is
// added to the diagonal of Sigma before inversion; without it a singular
// Sigma raises SingularPriorError (suggesting the jitter option).
MvnPrior posterior_general(const MvnPrior& prior, const Matrix& omega_prev,
                           std::span<const double> observations,
                           std::optional<double> jitter = std::nullopt);

} // namespace iccv
