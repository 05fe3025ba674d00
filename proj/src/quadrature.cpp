// SPDX-License-Identifier: Apache-2.0
#include "bigjump/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bigjump/types.hpp"

namespace bigjump {

namespace {

// Gauss7/Kronrod15 nodes and weights (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                           0.38183005050511894495, 0.41795918367346938776};

struct Segment {
  double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double m = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kWgk[7] * f0;
  double g = kWg[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double dx = m * kXgk[i];
    const double fi = f(c - dx) + f(c + dx);
    k += kWgk[i] * fi;
    if (i % 2 == 1) g += kWg[i / 2] * fi;
  }
  evals += 15;
  k *= m;
  g *= m;
  double err = std::abs(k - g);
  if (!std::isfinite(err)) err = std::abs(k) + 1.0;
  return Segment{a, b, k, err};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, std::vector<double> breakpoints) {
  QuadResult out;
  if (!(b > a)) return out;

  std::vector<double> cuts;
  cuts.push_back(a);
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double c : breakpoints)
    if (c > a * (1 + 1e-14) + 1e-300 && c < b && (cuts.empty() || c > cuts.back() * (1 + 1e-14)))
      cuts.push_back(c);
  cuts.push_back(b);

  std::vector<Segment> segs;
  segs.reserve(256);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    segs.push_back(gk15(f, cuts[i], cuts[i + 1], out.evaluations));

  constexpr std::size_t kMaxSegments = 4096;
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= std::max(rel_tol * std::abs(total), abs_tol) || segs.size() >= kMaxSegments ||
        segs[worst].error <= 0.0) {
      out.value = total;
      out.abs_error_est = err;
      return out;
    }
    const Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {  // interval at floating-point resolution
      segs[worst].error = 0.0;
      continue;
    }
    segs[worst] = gk15(f, s.a, mid, out.evaluations);
    segs.push_back(gk15(f, mid, s.b, out.evaluations));
  }
}

namespace {

// Geometric breakpoints 2^k spacings away from the left edge, where the
// big-jump integrands concentrate.
std::vector<double> geometric_cuts(double a, double b) {
  std::vector<double> cuts;
  if (!(a > 0.0)) {
    double step = b / 1024.0;
    for (double c = step; c < b; c *= 2.0) cuts.push_back(c);
    return cuts;
  }
  for (double c = a * 2.0; c < b; c *= 2.0) cuts.push_back(c);
  return cuts;
}

// \int_a^b F̄w(x - y) dFm(y) with the measure given by tail differences of Fm
// on a geometric partition (no density needed). Error from comparing against
// the half-resolution sum.
QuadResult stieltjes_weighted(const TailDistribution& Fm, const TailDistribution& Fw,
                              double a, double b, double x, int cells) {
  QuadResult out;
  if (!(b > a)) return out;
  const double lo = std::max(a, Fm.support_lower() > 0 ? Fm.support_lower() : a);
  if (!(b > lo)) return out;

  auto run = [&](int n) {
    const double ratio = std::log(b / std::max(lo, 1e-300)) / n;
    double sum = 0.0;
    double t_prev = Fm.tail(lo);
    double y_prev = lo;
    for (int i = 1; i <= n; ++i) {
      const double y = (lo > 0.0) ? lo * std::exp(ratio * i)
                                  : lo + (b - lo) * static_cast<double>(i) / n;
      const double t = Fm.tail(y);
      const double mass = t_prev - t;
      if (mass > 0.0) {
        const double ymid = (y_prev > 0.0) ? std::sqrt(y_prev * y) : 0.5 * (y_prev + y);
        sum += Fw.tail(x - ymid) * mass;
      }
      t_prev = t;
      y_prev = y;
    }
    return sum;
  };

  const double full = run(cells);
  const double half = run(cells / 2);
  out.value = full;
  out.abs_error_est = std::abs(full - half);
  out.evaluations = cells + cells / 2;
  return out;
}

// \int_a^b F̄w(x - y) dFm(y) routed through the density when available.
QuadResult weighted_tail_integral(const TailDistribution& Fm, const TailDistribution& Fw,
                                  double a, double b, double x, double rel_tol) {
  if (!(b > a)) return QuadResult{};
  if (Fm.has_density()) {
    auto f = [&](double y) { return Fw.tail(x - y) * Fm.density(y); };
    return integrate(f, a, b, rel_tol, 1e-300, geometric_cuts(a, b));
  }
  return stieltjes_weighted(Fm, Fw, a, b, x, 10000);
}

}  // namespace

QuadResult intermediate_integral(const TailDistribution& F,
                                 const std::function<double(double)>& h, double x) {
  const double hx = h(x);
  if (!(hx > 0.0)) throw std::domain_error("intermediate_integral: h(x) must be > 0");
  if (hx >= 0.5 * x) return QuadResult{};  // empty interval
  const double a = hx, b = x - hx;

  if (!F.has_density()) return stieltjes_weighted(F, F, a, b, x, 10000);

  // Split at x/2 and fold the upper half back with z = x - y, so both pieces
  // decay away from their left endpoint.
  const double m = 0.5 * x;
  auto lower = [&](double y) { return F.tail(x - y) * F.density(y); };
  auto upper = [&](double z) { return F.tail(z) * F.density(x - z); };
  QuadResult lo = integrate(lower, a, m, 1e-8, 1e-300, geometric_cuts(a, m));
  QuadResult hi = integrate(upper, a, m, 1e-8, 1e-300, geometric_cuts(a, m));
  QuadResult out;
  out.value = lo.value + hi.value;
  out.abs_error_est = lo.abs_error_est + hi.abs_error_est;
  out.evaluations = lo.evaluations + hi.evaluations;
  return out;
}

QuadResult conv_tail2(const TailDistribution& F1, const TailDistribution& F2, double x) {
  const double s1 = F1.support_lower(), s2 = F2.support_lower();
  if (s1 < 0.0 || s2 < 0.0)
    throw UnsupportedError("conv_tail2: supports below 0 are handled by Monte Carlo");
  if (x <= s1 + s2) return QuadResult{1.0, 0.0, 0};

  // P(X+Y > x) = F̄1(x/2) F̄2(x/2) + \int_{s2}^{x/2} F̄1(x-y) dF2
  //                                + \int_{s1}^{x/2} F̄2(x-y) dF1.
  const double m = 0.5 * x;
  QuadResult out;
  out.value = F1.tail(m) * F2.tail(m);
  const QuadResult i2 = weighted_tail_integral(F2, F1, s2, m, x, 1e-10);
  const QuadResult i1 = weighted_tail_integral(F1, F2, s1, m, x, 1e-10);
  out.value += i1.value + i2.value;
  out.abs_error_est = i1.abs_error_est + i2.abs_error_est;
  out.evaluations = i1.evaluations + i2.evaluations;
  return out;
}

namespace {

// Log-space Stieltjes: \int_a^b exp(ltw(x-y) - base) dFm(y) with cell masses
// formed as exp(lt(y_i)) * (-expm1(lt(y_{i+1}) - lt(y_i))).
QuadResult stieltjes_weighted_rebased(const TailDistribution& Fm, const TailDistribution& Fw,
                                      double a, double b, double x, double base, int cells) {
  QuadResult out;
  const double lo = std::max(a, Fm.support_lower() > 0 ? Fm.support_lower() : a);
  if (!(b > lo)) return out;
  auto run = [&](int n) {
    const double ratio = std::log(b / std::max(lo, 1e-300)) / n;
    double sum = 0.0;
    double lt_prev = Fm.log_tail(lo);
    double y_prev = lo;
    for (int i = 1; i <= n; ++i) {
      const double y = (lo > 0.0) ? lo * std::exp(ratio * i)
                                  : lo + (b - lo) * static_cast<double>(i) / n;
      const double lt = Fm.log_tail(y);
      const double d = lt - lt_prev;
      if (d < 0.0 && std::isfinite(lt_prev)) {
        const double log_mass = lt_prev + std::log(-std::expm1(d));
        const double ymid = (y_prev > 0.0) ? std::sqrt(y_prev * y) : 0.5 * (y_prev + y);
        sum += std::exp(log_mass + Fw.log_tail(x - ymid) - base);
      }
      lt_prev = lt;
      y_prev = y;
    }
    return sum;
  };
  const double full = run(cells);
  const double half = run(cells / 2);
  out.value = full;
  out.abs_error_est = std::abs(full - half);
  out.evaluations = cells + cells / 2;
  return out;
}

QuadResult weighted_tail_integral_rebased(const TailDistribution& Fm, const TailDistribution& Fw,
                                          double a, double b, double x, double base) {
  if (!(b > a)) return QuadResult{};
  if (Fm.has_density()) {
    auto f = [&, base](double y) {
      return std::exp(Fw.log_tail(x - y) + Fm.log_density(y) - base);
    };
    return integrate(f, a, b, 1e-10, 1e-300, geometric_cuts(a, b));
  }
  return stieltjes_weighted_rebased(Fm, Fw, a, b, x, base, 10000);
}

}  // namespace

QuadResult conv_tail2_ratio(const TailDistribution& F1, const TailDistribution& F2, double x) {
  const double s1 = F1.support_lower(), s2 = F2.support_lower();
  if (s1 < 0.0 || s2 < 0.0)
    throw UnsupportedError("conv_tail2_ratio: supports below 0 are handled by Monte Carlo");
  const double base = F1.log_tail(x);
  if (!std::isfinite(base))
    throw std::domain_error("conv_tail2_ratio: reference tail has no finite log at x");
  if (x <= s1 + s2) return QuadResult{std::exp(-base), 0.0, 0};

  const double m = 0.5 * x;
  QuadResult out;
  out.value = std::exp(F1.log_tail(m) + F2.log_tail(m) - base);
  const QuadResult i2 = weighted_tail_integral_rebased(F2, F1, s2, m, x, base);
  const QuadResult i1 = weighted_tail_integral_rebased(F1, F2, s1, m, x, base);
  out.value += i1.value + i2.value;
  out.abs_error_est = i1.abs_error_est + i2.abs_error_est;
  out.evaluations = i1.evaluations + i2.evaluations;
  return out;
}

QuadResult intermediate_integral_ratio(const TailDistribution& F,
                                       const std::function<double(double)>& h, double x) {
  const double hx = h(x);
  if (!(hx > 0.0)) throw std::domain_error("intermediate_integral_ratio: h(x) must be > 0");
  if (hx >= 0.5 * x) return QuadResult{};
  const double base = F.log_tail(x);
  if (!std::isfinite(base))
    throw std::domain_error("intermediate_integral_ratio: reference tail has no finite log at x");
  const double a = hx, b = x - hx;

  if (!F.has_density()) return stieltjes_weighted_rebased(F, F, a, b, x, base, 10000);

  const double m = 0.5 * x;
  auto lower = [&, base](double y) { return std::exp(F.log_tail(x - y) + F.log_density(y) - base); };
  auto upper = [&, base](double z) { return std::exp(F.log_tail(z) + F.log_density(x - z) - base); };
  QuadResult lo = integrate(lower, a, m, 1e-8, 1e-300, geometric_cuts(a, m));
  QuadResult hi = integrate(upper, a, m, 1e-8, 1e-300, geometric_cuts(a, m));
  QuadResult out;
  out.value = lo.value + hi.value;
  out.abs_error_est = lo.abs_error_est + hi.abs_error_est;
  out.evaluations = lo.evaluations + hi.evaluations;
  return out;
}

QuadResult product_conv_tail(const TailDistribution& Fx, const TailDistribution& Fv, double x) {
  if (Fx.support_lower() < 0.0 || Fv.support_lower() < 0.0)
    throw UnsupportedError("product_conv_tail: positive laws only");
  const TailDistribution* weight = &Fx;
  const TailDistribution* meas = &Fv;
  if (!Fv.has_density() && Fx.has_density()) std::swap(weight, meas);
  if (!meas->has_density())
    throw UnsupportedError("product_conv_tail: needs a density on one factor");

  // P(X V > x) = \int F̄x(x/v) fV(v) dv, truncated where the factor's mass is
  // below 1e-18 (added to the error bound).
  const double v_hi = meas->quantile(1e-18);
  const double v_lo = std::max(meas->support_lower(), 1e-12);
  auto f = [&](double v) { return weight->tail(x / v) * meas->density(v); };
  std::vector<double> cuts;
  for (double c = std::max(v_lo * 2.0, 1e-6); c < v_hi; c *= 2.0) cuts.push_back(c);
  QuadResult out = integrate(f, v_lo, v_hi, 1e-10, 1e-300, cuts);
  out.abs_error_est += 1e-18;
  return out;
}

Lemma22Result lemma22_bound_check(const TailDistribution& F, double a, double b, double x) {
  if (!(a > 0.0) || !(b >= a) || !(x > b))
    throw std::domain_error("lemma22_bound_check: need 0 < a <= b < x");
  Lemma22Result out;
  if (a == b) {
    out.c_constant = 1.0;
    return out;  // degenerate interval: both sides 0
  }
  out.lhs = weighted_tail_integral(F, F, a, b, x, 1e-8).value;
  auto g = [&](double y) { return F.tail(x - y) * F.tail(y); };
  out.rhs = integrate(g, a, b, 1e-8, 1e-300, geometric_cuts(a, b)).value;

  double sup = 0.0;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double y = a * std::pow(b / a, static_cast<double>(i) / n);
    const double t1 = F.tail(y + 1.0);
    if (t1 > 0.0) sup = std::max(sup, F.tail(y) / t1);
  }
  out.c_constant = sup * sup;
  return out;
}

Example3Integrals example3_beta_integrals(double x) {
  if (!(x > 1.0)) throw std::domain_error("example3_beta_integrals: requires x > 1");
  Example3Integrals out;
  const double L = std::log(x);

  // Both integrands vary on the beta-scale 1/log x; seed cuts where
  // x^beta = 2^k.
  std::vector<double> cuts;
  for (double c = M_LN2 / L; c < 1.0; c += M_LN2 / L) {
    cuts.push_back(c);
    if (cuts.size() > 200) break;
  }

  auto p2f = [&](double beta) { return std::exp(-2.0 * std::pow(x, beta)); };
  out.p2 = integrate(p2f, 0.0, 1.0, 1e-12, 1e-300, cuts).value;

  const double e_top = 2.0 * x < 745.0 ? expint_e1(2.0 * x) : 0.0;
  out.p2_via_e1 = (expint_e1(2.0) - e_top) / L;

  auto p1f = [&](double beta) {
    const double xb = std::pow(x, beta);
    return std::exp(2.0 * beta * L - xb);
  };
  out.p1_bound = integrate(p1f, 0.0, 1.0, 1e-12, 1e-300, cuts).value;
  return out;
}

QuadResult example3_p1(double x) {
  if (!(x > 1.0)) throw std::domain_error("example3_p1: requires x > 1");
  const double L = std::log(x);
  // Conditional on the shape beta, both summands are unit-scale Weibull(beta)
  // and P(max <= x, sum > x | beta) = \int_0^x f(y) (F̄(x-y) - F̄(x)) dy.
  // Substituting u = y^beta (so u ~ Exp(1)) removes the y -> 0 singularity
  // that makes direct y-space quadrature blow up for tiny beta:
  //   inner(beta) = \int_0^{x^beta} e^{-u} [e^{-(x - u^{1/beta})^beta} - e^{-x^beta}] du.
  auto inner = [&](double beta) {
    const double s = std::pow(x, beta);
    const double tail_x = std::exp(-s);
    auto g = [&](double u) {
      const double y = std::exp(std::log(u) / beta);  // underflows to 0 harmlessly
      const double rest = x - y;
      const double inner_tail = rest > 0.0 ? std::exp(-std::pow(rest, beta)) : 1.0;
      return std::exp(-u) * (inner_tail - tail_x);
    };
    const double u_hi = std::min(s, 60.0);  // e^{-u} mass beyond 60 is < 1e-26
    std::vector<double> ucuts;
    for (double c = 1.0 / 1024.0; c < u_hi; c *= 2.0) ucuts.push_back(c);
    return integrate(g, 0.0, u_hi, 1e-9, 1e-300, ucuts).value;
  };
  std::vector<double> cuts;
  for (double c = M_LN2 / L; c < 1.0; c += M_LN2 / L) {
    cuts.push_back(c);
    if (cuts.size() > 120) break;
  }
  return integrate(inner, 0.0, 1.0, 1e-7, 1e-300, cuts);
}

}  // namespace bigjump
