#include "iccv/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "iccv/errors.hpp"

namespace iccv {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

Matrix cholesky_lower(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("cholesky_lower: matrix is not square");
    }
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) {
            throw NotPositiveDefiniteError(
                j, "cholesky_lower: matrix not positive definite, pivot " + std::to_string(j) +
                       " has value " + std::to_string(d));
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

std::vector<double> forward_solve(const Matrix& lower, const std::vector<double>& b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw std::invalid_argument("forward_solve: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
        y[i] = s / lower(i, i);
    }
    return y;
}

std::vector<double> backward_solve_transposed(const Matrix& lower, const std::vector<double>& y) {
    const std::size_t n = lower.rows();
    if (y.size() != n) throw std::invalid_argument("backward_solve_transposed: size mismatch");
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
        x[ii] = s / lower(ii, ii);
    }
    return x;
}

std::vector<double> spd_solve(const Matrix& lower, const std::vector<double>& b) {
    return backward_solve_transposed(lower, forward_solve(lower, b));
}

Matrix spd_inverse(const Matrix& lower) {
    const std::size_t n = lower.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = spd_solve(lower, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    // Symmetrize away the last-bit asymmetry from columnwise solves.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

std::vector<double> sample_mvn(const std::vector<double>& mean, const Matrix& cov,
                               RandomStream& stream) {
    const std::size_t n = mean.size();
    if (cov.rows() != n || cov.cols() != n) {
        throw std::invalid_argument("sample_mvn: mean/cov dimension mismatch");
    }
    const Matrix l = cholesky_lower(cov);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = stream.next_normal();
    std::vector<double> x(mean);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k <= i; ++k) x[i] += l(i, k) * z[k];
    return x;
}

double sample_std_normal(RandomStream& stream) {
    return stream.next_normal();
}

} // namespace iccv
