// SPDX-License-Identifier: Apache-2.0
#include "bigjump/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bigjump {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

// Power series: E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!).
// Converges fast for x < ~2; used below the 1.1 split point.
double e1_series(double x) {
  double term = 1.0;  // (-x)^k / k!
  double sum = 0.0;
  for (int k = 1; k <= 80; ++k) {
    term *= -x / k;
    const double add = -term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return -kEulerGamma - std::log(x) + sum;
}

// Continued fraction E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))),
// evaluated by the modified Lentz algorithm.
double e1_contfrac(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) break;
  }
  return h * std::exp(-x);
}
}  // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1: requires x > 0");
  if (x >= 745.0) return 0.0;  // e^{-x} underflows; |error| < 1e-300
  // Series and continued fraction both reach 1e-12 absolute at the split.
  return x < 1.1 ? e1_series(x) : e1_contfrac(x);
}

double normal_tail(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

double normal_density(double z) { return std::exp(-0.5 * z * z - 0.5 * kLog2Pi); }

double log_normal_tail(double z) {
  if (z < 35.0) return std::log(normal_tail(z));
  // erfc underflows near z ~ 37.5; switch to the asymptotic expansion
  // log P(N>z) = -z^2/2 - log(z sqrt(2 pi)) + log(1 - 1/z^2 + 3/z^4 - ...).
  const double zi2 = 1.0 / (z * z);
  const double series =
      1.0 - zi2 * (1.0 - 3.0 * zi2 * (1.0 - 5.0 * zi2 * (1.0 - 7.0 * zi2)));
  return -0.5 * z * z - 0.5 * kLog2Pi - std::log(z) + std::log(series);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation, |rel err| < 1.2e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF brings the error to ~1e-15.
  const double e = 0.5 * std::erfc(-x * M_SQRT1_2) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace bigjump
