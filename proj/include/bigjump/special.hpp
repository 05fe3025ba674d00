// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace bigjump {

// Exponential integral E1(x) = \int_x^inf e^{-u}/u du, x > 0.
// Absolute error <= 1e-12 on [1e-3, 700]. Throws std::domain_error for x <= 0.
double expint_e1(double x);

// Standard normal upper tail P(N > z).
double normal_tail(double z);

// log of normal_tail, accurate far beyond the point where the tail itself
// underflows (asymptotic expansion for large z).
double log_normal_tail(double z);

// Standard normal density.
double normal_density(double z);

// Inverse standard normal CDF, p in (0,1). Relative error ~1e-15 after one
// Halley refinement of Acklam's rational approximation.
double normal_quantile(double p);

}  // namespace bigjump
