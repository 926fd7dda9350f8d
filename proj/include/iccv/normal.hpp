#pragma once

namespace iccv {

// Standard normal CDF Phi(x). Absolute error below 1e-12 including far tails
// (computed through erfc, so Phi(-38) is a subnormal positive value, not 0).
// Throws std::invalid_argument on non-finite input.
double std_normal_cdf(double x);

// Standard normal density phi(x).
double std_normal_pdf(double x);

// Inverse CDF, p in (0,1). Wichura's AS 241 (PPND16): |Phi(result) - p|
// stays below 1e-10 over the full domain. Throws std::invalid_argument
// when p is outside (0,1).
double std_normal_quantile(double p);

} // namespace iccv
