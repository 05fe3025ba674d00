// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace bigjump {

// Geometric grid from lo to hi inclusive. Exact powers of ten land on grid
// points whenever (points-1) is a multiple of the decade count.
std::vector<double> geometric_grid(double lo, double hi, int points);

// One evaluation of an asymptotic quantity. `ci` is a confidence half-width
// for Monte Carlo rows and a quadrature error bound for deterministic rows
// (0 for closed forms). `target` is the per-row comparison value when one
// exists (e.g. (sum c_i) * Fbar(x)).
struct ConvRow {
  double x = 0.0;
  double estimate = 0.0;
  double ci = 0.0;
  double target = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t hits = 0;
  bool reliable = true;
};

struct ConvergenceTable {
  std::string label;
  std::vector<ConvRow> rows;

  void push(double x, double estimate, double ci = 0.0) {
    rows.push_back(ConvRow{x, estimate, ci});
  }
  bool empty() const { return rows.empty(); }
};

enum class Verdict { converges_to_target, diverges, inconclusive };

const char* verdict_name(Verdict v);

// Outcome of the last-three-decades limit rule. For target-style checks
// `target` is the value tested; for stabilized detection it is the value the
// sequence settled on. `final_value` is the estimate at the largest grid x.
struct LimitVerdict {
  Verdict verdict = Verdict::inconclusive;
  double target = std::numeric_limits<double>::quiet_NaN();
  double final_value = std::numeric_limits<double>::quiet_NaN();
  ConvergenceTable table;

  bool converged_to(double t, double tol) const {
    return verdict == Verdict::converges_to_target && std::abs(target - t) <= tol;
  }
  // Shorthand for target-0 condition checks.
  bool vanishes(double tol = 1e-2) const { return converged_to(0.0, tol); }
};

// Indices of the rows nearest x_max/10^(k-1) for k = decades..1 (ascending x).
std::vector<std::size_t> decade_mark_indices(const ConvergenceTable& t, int decades = 3);

// Pre-registered rule for "estimate -> target":
//  converges  : distance at the final decade mark <= max(tol, 5*ci) and the
//               three decade distances are non-increasing (10% slack, CI-aware)
//               or all already below tolerance;
//  diverges   : final distance > 10*tol and not improving across decades;
//  inconclusive otherwise.
LimitVerdict classify_limit_to_target(const ConvergenceTable& t, double target,
                                      double tol = 1e-2);

// Detects an a-priori-unknown stabilized limit: the last two decade marks must
// agree within `band` (relative to the settled scale, widened by CI), with the
// earlier mark approaching. Monotone growth by >= 30% per decade and >= 3x
// overall is classified as divergence.
LimitVerdict classify_stabilized(const ConvergenceTable& t, double band = 1e-3);

// Least-squares slope of log10(estimate) against log10(x) over the final
// `decades` decades. Rows with non-positive estimates are skipped.
double log_slope_last_decades(const ConvergenceTable& t, int decades = 3);

}  // namespace bigjump
