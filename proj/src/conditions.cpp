// SPDX-License-Identifier: Apache-2.0
#include "bigjump/conditions.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "bigjump/models.hpp"
#include "bigjump/parallel.hpp"
#include "bigjump/quadrature.hpp"

namespace bigjump {

namespace {
int resolve_threads_for_checks() {
  if (const char* env = std::getenv("BIGJUMP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 16u));
}
}  // namespace

bool D3Verdicts::all_pass() const {
  return d3i.vanishes() && d3ii.vanishes() && d3iii.vanishes();
}

LimitVerdict estimate_c(const TailDistribution& Fi, const TailDistribution& Fref,
                        std::span<const double> xgrid) {
  ConvergenceTable t;
  t.label = "tail_i/tail_ref";
  for (double x : xgrid) {
    const double num = Fi.log_tail(x), den = Fref.log_tail(x);
    if (!std::isfinite(num) || !std::isfinite(den)) continue;
    t.push(x, std::exp(num - den));
  }
  LimitVerdict v = classify_stabilized(t);
  // Domination clause: a stabilized limit with upward drift is no limit.
  if (v.verdict == Verdict::converges_to_target && log_slope_last_decades(t) > 0.05)
    v.verdict = Verdict::inconclusive;
  return v;
}

bool check_d2_domination(const TailDistribution& Fi, const TailDistribution& Fref,
                         std::span<const double> xgrid) {
  ConvergenceTable t;
  for (double x : xgrid) {
    const double num = Fi.log_tail(x), den = Fref.log_tail(x);
    if (!std::isfinite(num) || !std::isfinite(den)) return false;
    const double ratio = std::exp(num - den);
    if (!std::isfinite(ratio)) return false;
    t.push(x, ratio);
  }
  if (t.rows.size() < 4) return false;
  return log_slope_last_decades(t) <= 0.02;
}

namespace {

// Restrict a multiple to grid points where c H(x) < x/2; a multiple needs at
// least three decades of feasible points to be classified.
std::vector<double> feasible_points(const BoundaryGenerator& H, double c,
                                    std::span<const double> xgrid) {
  std::vector<double> xs;
  for (double x : xgrid)
    if (c * H.base(x) < 0.5 * x) xs.push_back(x);
  if (!xs.empty() && xs.back() / xs.front() < 1e3 - 1.0) xs.clear();
  return xs;
}

}  // namespace

ConditionReport check_d3(const BoundingSpec& bound, const TailDistribution& F,
                         const BoundaryGenerator& H, std::span<const double> xgrid,
                         double vanish_tol) {
  ConditionReport report;
  bool first_feasible = true;
  bool overall = true;
  bool any = false;
  for (double c : H.multiples) {
    const auto xs = feasible_points(H, c, xgrid);
    if (xs.empty()) {
      std::ostringstream os;
      os << "multiple " << c << " skipped: c*H(x) >= x/2 over the grid";
      report.notes.push_back(os.str());
      continue;
    }
    D3Verdicts v;
    ConvergenceTable ti, tii, tiii;
    ti.label = "d3i";
    tii.label = "d3ii";
    tiii.label = "d3iii";
    for (double x : xs) {
      const double hx = c * H.base(x);
      const double log_ref = F.log_tail(x);
      const double bt = bound.b_tail(hx);
      ti.push(x, bt > 0.0 ? std::exp(std::log(bt) - log_ref) : 0.0);
      tii.push(x, bound.r(x) * F.tail(hx));
      auto hfun = [&](double) { return hx; };
      const QuadResult ii = intermediate_integral_ratio(F, hfun, x);
      tiii.push(x, bound.r(x) * ii.value, bound.r(x) * ii.abs_error_est);
    }
    v.d3i = classify_limit_to_target(ti, 0.0, vanish_tol);
    v.d3ii = classify_limit_to_target(tii, 0.0, vanish_tol);
    v.d3iii = classify_limit_to_target(tiii, 0.0, vanish_tol);
    overall = overall && v.d3i.converged_to(0.0, vanish_tol) &&
              v.d3ii.converged_to(0.0, vanish_tol) && v.d3iii.converged_to(0.0, vanish_tol);
    any = true;
    if (first_feasible) {
      report.headline = v;
      first_feasible = false;
    }
    report.per_multiple.emplace(c, std::move(v));
  }
  report.overall = any && overall;
  if (!any) report.notes.push_back("no feasible multiple on the grid");
  return report;
}

HazardSufficiency hazard_concavity_sufficient(const TailDistribution& F,
                                              const std::function<double(double)>& r,
                                              const BoundaryGenerator& H,
                                              std::span<const double> xgrid) {
  if (xgrid.empty()) return HazardSufficiency::indeterminate;
  // Eventual concavity of Q: centered second differences with relative step
  // 1e-3, allowing 1e-9 |Q| of slack, from the start of the grid upward.
  bool indeterminate = false;
  for (double x : xgrid) {
    const double dx = 1e-3 * x;
    if (!(x - dx > F.support_lower())) continue;
    const double qm = F.hazard(x - dx), q0 = F.hazard(x), qp = F.hazard(x + dx);
    const double second = qp - 2.0 * q0 + qm;
    const double slack = 1e-9 * std::abs(q0);
    const double noise = 8.0 * std::abs(q0) * 2.3e-16;
    if (second > slack + noise) return HazardSufficiency::fails;
    if (second > slack && second <= slack + noise) indeterminate = true;
  }
  if (indeterminate) return HazardSufficiency::indeterminate;

  // x r(x) F̄(c H(x)) -> 0 for every feasible multiple.
  for (double c : H.multiples) {
    const auto xs = feasible_points(H, c, xgrid);
    if (xs.empty()) continue;
    ConvergenceTable t;
    for (double x : xs) t.push(x, x * r(x) * F.tail(c * H.base(x)));
    if (!classify_limit_to_target(t, 0.0).vanishes()) return HazardSufficiency::fails;
  }
  return HazardSufficiency::holds;
}

LimitVerdict check_d4(const CondIndepModel& model, const LittleH& h, int i, int j,
                      std::span<const double> xgrid, std::uint64_t replications,
                      std::uint64_t seed) {
  ConvergenceTable t;
  t.label = "d4";
  std::vector<std::string> dropped;
  const std::size_t nx = xgrid.size();
  const auto acc = run_replications(
      replications, nx, resolve_threads_for_checks(),
      [&](std::uint64_t repl, std::vector<double>& out) {
        SplitMix64 rng = make_stream(seed, repl, 0);
        const Latent latent = model.sample_latent(rng);
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double hx = h.fn(xgrid[ix]);
          out[ix] = model.cond_tail(i, xgrid[ix] + hx, latent) *
                    model.cond_cdf(j, -hx, latent);
        }
      });
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double x = xgrid[ix];
    const double log_ref = model.reference().log_tail(x);
    const double n = static_cast<double>(replications);
    const double mean = acc[ix].sum / n;
    const double var =
        std::max(0.0, (acc[ix].sumsq - n * mean * mean) / std::max(1.0, n - 1));
    const double se = std::sqrt(var / n);
    const double ess = acc[ix].sumsq > 0.0 ? acc[ix].sum * acc[ix].sum / acc[ix].sumsq : 0.0;
    if (mean > 0.0 && ess < 50.0) {
      std::ostringstream os;
      os << "x=" << x << " dropped: effective sample size " << ess << " < 50";
      dropped.push_back(os.str());
      continue;
    }
    const double scale = std::exp(-log_ref);
    t.push(x, mean * scale, 1.959963984540054 * se * scale);
  }
  LimitVerdict v = classify_limit_to_target(t, 0.0);
  if (t.rows.size() < 3) v.verdict = Verdict::inconclusive;
  return v;
}

}  // namespace bigjump
