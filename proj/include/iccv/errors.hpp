#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iccv {

// Symmetric factorization hit a non-positive pivot; `index` is the failing
// (0-based) pivot row.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    NotPositiveDefiniteError(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// Prior covariance is singular and no jitter was requested.
class SingularPriorError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation asked of a prior kind / model combination the theory does not cover.
class UnsupportedError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ICCV grid search found no admissible point; carries the smallest size seen.
class SearchFailureError : public std::runtime_error {
public:
    SearchFailureError(double min_size, const std::string& what)
        : std::runtime_error(what), min_size_(min_size) {}
    double min_size() const { return min_size_; }

private:
    double min_size_;
};

// Research is never profitable: no z solves the baseline stopping boundary.
class NoThresholdError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matched-pairs summary violates its own variance bound.
class InconsistentSummaryError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Too few studies to identify a prior spread.
class InsufficientDataError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace iccv
