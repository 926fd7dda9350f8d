#pragma once

#include <functional>

namespace iccv {

// Adaptive composite Simpson integration of a smooth integrand on [a, b] to
// absolute tolerance `tol`. Depth is bounded; smooth bounded integrands (all
// uses here are products of normal cdfs/densities) converge long before the
// bound bites.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11, int max_depth = 60);

} // namespace iccv
