// SPDX-License-Identifier: Apache-2.0
#include "bigjump/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bigjump {

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw std::invalid_argument("geometric_grid: need 0 < lo < hi and points >= 2");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converges_to_target: return "converges_to_target";
    case Verdict::diverges: return "diverges";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<std::size_t> decade_mark_indices(const ConvergenceTable& t, int decades) {
  std::vector<std::size_t> idx;
  if (t.rows.empty()) return idx;
  const double xmax = t.rows.back().x;
  for (int k = decades - 1; k >= 0; --k) {
    const double want = xmax / std::pow(10.0, k);
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double d = std::abs(std::log(t.rows[i].x / want));
      if (d < bestd) {
        bestd = d;
        best = i;
      }
    }
    if (idx.empty() || best > idx.back()) idx.push_back(best);
  }
  return idx;
}

namespace {
struct Marks {
  std::vector<double> v;   // estimates at decade marks, ascending x
  std::vector<double> ci;  // matching half-widths
  bool ok = false;
};

Marks decade_marks(const ConvergenceTable& t) {
  Marks m;
  const auto idx = decade_mark_indices(t, 3);
  if (idx.size() < 2) return m;
  for (auto i : idx) {
    m.v.push_back(t.rows[i].estimate);
    m.ci.push_back(t.rows[i].ci);
  }
  // Pad so the rules below can always address three marks.
  while (m.v.size() < 3) {
    m.v.insert(m.v.begin(), m.v.front());
    m.ci.insert(m.ci.begin(), m.ci.front());
  }
  m.ok = true;
  return m;
}
}  // namespace

LimitVerdict classify_limit_to_target(const ConvergenceTable& t, double target, double tol) {
  LimitVerdict out;
  out.table = t;
  out.target = target;
  if (t.rows.empty()) return out;
  out.final_value = t.rows.back().estimate;

  const Marks m = decade_marks(t);
  if (!m.ok) return out;
  double e[3], c[3];
  for (int i = 0; i < 3; ++i) {
    e[i] = std::abs(m.v[i] - target);
    c[i] = m.ci[i];
  }
  if (!std::isfinite(e[2])) {
    out.verdict = Verdict::diverges;
    return out;
  }
  // Monte Carlo rows may be noisier than the nominal tolerance; give them up
  // to 5 half-widths of relief, but never past 0.05 -- an estimate many CIs
  // away from the target must not pass on wide error bars alone.
  const double final_tol = std::max(tol, std::min(5.0 * c[2], 0.05));
  const bool below = e[2] <= final_tol;
  const bool all_below = e[0] <= final_tol && e[1] <= final_tol && below;
  const bool approaching = e[1] <= 1.1 * e[0] + c[0] + c[1] && e[2] <= 1.1 * e[1] + c[1] + c[2];
  if (below && (approaching || all_below)) {
    out.verdict = Verdict::converges_to_target;
    return out;
  }
  const bool not_improving = e[2] + c[2] >= 0.9 * (e[1] - c[1]);
  if (e[2] > 10.0 * tol && e[2] > 5.0 * c[2] && not_improving) {
    out.verdict = Verdict::diverges;
    return out;
  }
  return out;
}

LimitVerdict classify_stabilized(const ConvergenceTable& t, double band) {
  LimitVerdict out;
  out.table = t;
  if (t.rows.empty()) return out;
  out.final_value = t.rows.back().estimate;

  const Marks m = decade_marks(t);
  if (!m.ok) return out;
  const double v1 = m.v[0], v2 = m.v[1], v3 = m.v[2];
  if (!std::isfinite(v3)) {
    out.verdict = Verdict::diverges;
    return out;
  }
  // Small-limit branch: a ratio collapsing toward zero never stabilizes in
  // relative terms; accept it once all marks are tiny and non-increasing.
  const double small = 1e-3;
  if (std::abs(v1) <= small && std::abs(v2) <= small && std::abs(v3) <= small &&
      std::abs(v3) <= 1.1 * std::abs(v2) + m.ci[1] + m.ci[2] &&
      std::abs(v2) <= 1.1 * std::abs(v1) + m.ci[0] + m.ci[1]) {
    out.verdict = Verdict::converges_to_target;
    out.target = v3;
    return out;
  }
  const double scale = std::max({std::abs(v3), std::abs(v2), 1e-300});
  const double gap23 = std::abs(v3 - v2);
  const double tol23 = std::max(band * scale, 3.0 * (m.ci[1] + m.ci[2]));
  const double d1 = std::abs(v1 - v3), d2 = std::abs(v2 - v3);
  const bool approaching = d2 <= 1.1 * d1 + m.ci[0] + m.ci[1] + band * scale;
  if (gap23 <= tol23 && approaching) {
    out.verdict = Verdict::converges_to_target;
    out.target = v3;
    return out;
  }
  const bool growing = v3 > 1.3 * v2 && v2 > 1.3 * v1 && v3 > 3.0 * std::abs(v1);
  if (growing) out.verdict = Verdict::diverges;
  return out;
}

double log_slope_last_decades(const ConvergenceTable& t, int decades) {
  if (t.rows.size() < 2) return 0.0;
  const double xmax = t.rows.back().x;
  const double xmin = xmax / std::pow(10.0, decades);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : t.rows) {
    if (r.x < xmin * (1.0 - 1e-12) || !(r.estimate > 0.0) || !std::isfinite(r.estimate))
      continue;
    const double lx = std::log10(r.x), ly = std::log10(r.estimate);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double det = n * sxx - sx * sx;
  if (det == 0.0) return 0.0;
  return (n * sxy - sx * sy) / det;
}

}  // namespace bigjump
