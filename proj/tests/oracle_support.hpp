// SPDX-License-Identifier: Apache-2.0
//
// Test-side oracles, kept independent of the integration engine they check:
// recursive adaptive Simpson, brute-force Riemann-Stieltjes sums, and small
// Monte Carlo helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "bigjump/dist.hpp"
#include "bigjump/rng.hpp"

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 60) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// E1 by direct quadrature with an analytic remainder bracket (abs err < 1e-13).
inline double expint_e1_oracle(double x) {
  auto f = [](double u) { return std::exp(-u) / u; };
  const double hi = x + 60.0;
  const double body = adaptive_simpson(f, x, hi, 1e-16);
  const double rem_lo = std::exp(-hi) / (hi + 1.0), rem_hi = std::exp(-hi) / hi;
  return body + 0.5 * (rem_lo + rem_hi);
}

// Brute-force \int_a^b Fbar(x-y) dF(y) on a geometric partition of `cells`.
inline double stieltjes_brute(const bigjump::TailDistribution& F, double a, double b, double x,
                              int cells) {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  double y_prev = a, t_prev = F.tail(a);
  const double step = std::log(b / a) / cells;
  for (int i = 1; i <= cells; ++i) {
    const double y = a * std::exp(step * i);
    const double t = F.tail(y);
    sum += F.tail(x - std::sqrt(y_prev * y)) * (t_prev - t);
    y_prev = y;
    t_prev = t;
  }
  return sum;
}

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

template <typename Draw>
McEstimate mc_mean(std::uint64_t n, std::uint64_t seed, Draw&& draw) {
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    bigjump::SplitMix64 rng = bigjump::make_stream(seed, i, 900);
    const double v = draw(rng);
    sum += v;
    sumsq += v * v;
  }
  McEstimate e;
  e.mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sumsq - n * e.mean * e.mean) / std::max<double>(1.0, n - 1.0));
  e.se = std::sqrt(var / static_cast<double>(n));
  return e;
}

// P(Y1^{1/beta} + Y2^{1/beta} > 1) for iid uniforms: the shape-mixture
// intermediate-overlap weight, as a 1-D reduction.
inline double j_beta(double beta) {
  auto f = [beta](double y) {
    const double y1b = std::pow(y, 1.0 / beta);
    return 1.0 - std::pow(std::max(0.0, 1.0 - y1b), beta);
  };
  return adaptive_simpson(f, 0.0, 1.0, 1e-12);
}

}  // namespace oracle
