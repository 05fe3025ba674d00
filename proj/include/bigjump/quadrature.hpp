// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "bigjump/dist.hpp"
#include "bigjump/types.hpp"

namespace bigjump {

struct QuadResult {
  double value = 0.0;
  double abs_error_est = 0.0;
  long evaluations = 0;
};

// Adaptive Gauss7/Kronrod15 integration of f over [a,b]. `breakpoints`
// seeds the initial subdivision (values outside (a,b) are ignored); pass the
// locations where the integrand concentrates. Error estimate is the
// conservative per-segment |K15 - G7| sum.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 1e-300,
                     std::vector<double> breakpoints = {});

// \int_{h(x)}^{x-h(x)} F̄(x-y) F(dy): the both-summands-intermediate mass.
// Returns exactly 0 when h(x) >= x/2. Uses the density when F has one and a
// geometric tail-difference (Stieltjes) partition of >= 10^4 cells otherwise.
QuadResult intermediate_integral(const TailDistribution& F,
                                 const std::function<double(double)>& h, double x);

// The same integral divided by F̄(x), assembled in log space so the ratio
// stays representable where tails and masses underflow individually.
QuadResult intermediate_integral_ratio(const TailDistribution& F,
                                       const std::function<double(double)>& h, double x);

// P(X1 + X2 > x) for independent summands on the positive half-line.
// Exactly 1 for x <= combined support; relative error target 1e-6 or better.
// Throws UnsupportedError for laws supported below 0 (use Monte Carlo there).
QuadResult conv_tail2(const TailDistribution& F1, const TailDistribution& F2, double x);

// P(X1 + X2 > x) / F̄1(x), assembled fully in log space so Weibull-type
// convolution ratios stay representable long after the tails themselves
// underflow. Same exactness below the combined support (returns 1/F̄1(x)).
QuadResult conv_tail2_ratio(const TailDistribution& F1, const TailDistribution& F2, double x);

// P(X V > x) for independent positive X ~ Fx, V ~ Fv (one of them must have a
// density). Used for product-factor models.
QuadResult product_conv_tail(const TailDistribution& Fx, const TailDistribution& Fv, double x);

// Both sides of the density-free long-tail bound
//   \int_a^b F̄(x-y) F(dy)  <=  C \int_a^b F̄(x-y) F̄(y) dy,
// with C = (sup_{y in [a,b]} F̄(y)/F̄(y+1))^2 scanned on a geometric grid.
struct Lemma22Result {
  double lhs = 0.0;
  double rhs = 0.0;       // the integral, before multiplying by C
  double c_constant = 0.0;
};
Lemma22Result lemma22_bound_check(const TailDistribution& F, double a, double b, double x);

// The two beta-integrals of the uniform(0,1) Weibull-shape mixture at unit
// scale: p2 = \int_0^1 exp(-2 x^beta) dbeta (joint exceedance of two
// conditionally independent copies) and p1_bound = \int_0^1 x^{2 beta}
// exp(-x^beta) dbeta (the crude intermediate bound). p2_via_e1 is the same
// p2 through the substitution u = 2 x^beta, for the identity check.
struct Example3Integrals {
  double p2 = 0.0;
  double p2_via_e1 = 0.0;
  double p1_bound = 0.0;
};
Example3Integrals example3_beta_integrals(double x);  // requires x > 1

// Exact both-intermediate probability P(max <= x, X1 + X2 > x) for the same
// mixture model, by conditioning on the shape: outer adaptive beta-integral
// of conv_tail2 minus the max term.
QuadResult example3_p1(double x);

}  // namespace bigjump
