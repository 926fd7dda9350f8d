#pragma once

#include <cstddef>
#include <vector>

#include "iccv/rng.hpp"

namespace iccv {

// Small dense row-major matrix. Everything in this project is symmetric
// positive definite and at most a few hundred square, so the only
// factorization offered is an unpivoted lower Cholesky.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool is_symmetric(double tol = 1e-12) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Lower-triangular Cholesky factor of an SPD matrix. Throws
// NotPositiveDefiniteError naming the failing pivot; no silent regularization.
Matrix cholesky_lower(const Matrix& a);

// Solve L y = b (L lower triangular).
std::vector<double> forward_solve(const Matrix& lower, const std::vector<double>& b);

// Solve L' x = y.
std::vector<double> backward_solve_transposed(const Matrix& lower, const std::vector<double>& y);

// Solve A x = b given the Cholesky factor of A.
std::vector<double> spd_solve(const Matrix& lower, const std::vector<double>& b);

// A^{-1} reconstructed column-by-column from the Cholesky factor.
Matrix spd_inverse(const Matrix& lower);

// One draw of N(mean, cov): mean + L z with z standard normals taken in
// order from the stream.
std::vector<double> sample_mvn(const std::vector<double>& mean, const Matrix& cov,
                               RandomStream& stream);

// One standard normal from the stream; the scalar counterpart of sample_mvn.
double sample_std_normal(RandomStream& stream);

} // namespace iccv
