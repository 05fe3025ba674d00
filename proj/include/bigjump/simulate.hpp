// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bigjump/grid.hpp"
#include "bigjump/models.hpp"

namespace bigjump {

enum class Estimator { plain, cond_last_step };
const char* estimator_name(Estimator e);

// Light-tailed stopping time, capped at its 0.999 quantile by default with
// the excess mass folded into the cap atom (bias bounded by tail_mass()).
class TauLaw {
 public:
  enum class Kind { fixed, geometric, poisson };

  static TauLaw fixed(int n);
  static TauLaw geometric(double p);      // support {1,2,...}, mean 1/p
  static TauLaw poisson(double lambda);   // support {0,1,...}

  Kind kind() const { return kind_; }
  int cap() const { return cap_; }
  double pmf_capped(int k) const;
  double mean_capped() const;
  double tail_mass() const;  // P(tau > cap) before folding
  int sample(SplitMix64& rng) const;
  // E[sum of the first (tau ^ cap) equivalence constants].
  double expected_c_sum(const CondIndepModel& model) const;
  std::string describe() const;

 private:
  TauLaw(Kind k, double param, int cap) : kind_(k), param_(param), cap_(cap) {}
  Kind kind_;
  double param_;
  int cap_;
};

struct SumQuery {
  CondIndepModel model;
  int n = 2;
  std::vector<double> x_grid;
  std::uint64_t replications = 100000;
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::cond_last_step;
  int threads = 0;  // 0: BIGJUMP_THREADS env, then hardware concurrency
};

struct McRow {
  double x = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double target = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t hits = 0;
  double ess = 0.0;
  bool reliable = true;
};

struct McTable {
  std::string label;
  std::string estimator;
  double n_or_tau = 0.0;
  std::vector<McRow> rows;

  ConvergenceTable to_convergence() const;
};

// P(X_1 + ... + X_n > x) over the grid. The conditional estimator draws the
// latent state and the first n-1 summands, then accumulates the conditional
// tail of the last one: unbiased under conditional independence, and never
// worse than the indicator at the rare end. Rows with effective sample size
// below 50 are flagged unreliable. Targets are (sum c_i) F̄(x) when the
// equivalence constants are exact.
McTable mc_sum_tail(const SumQuery& q);

// Two-summand split of the exceedance event. All components are estimated
// from the same replications: the sum tail, the both-intermediate part
// P(max <= x, sum > x), the joint exceedance P(min > x), the marginals, and
// for real-valued models the correction P(max > x, sum <= x) that the
// textbook identity omits. The residual table tracks
//   p_sum - (m1 + m2 - p2 + p1 - p_cancel),
// which has mean zero by construction.
struct DecompositionReport {
  McTable p_sum;
  McTable p1;
  McTable p2;
  McTable p_cancel;
  std::vector<McTable> per_term;
  McTable residual;
  // Classification ratios are normalized by the measured per-term sum, which
  // equals the reference normalization up to the equivalence constants and
  // stays meaningful when those constants are only weak-equivalence bounds.
  LimitVerdict p1_vanishes;  // target 0
  LimitVerdict p2_vanishes;  // target 0
  bool sum_ratio_reliable = false;  // a reliable top row existed
  bool sum_ratio_ok = false;        // and its sum/marginal-sum ratio was ~1
  bool single_big_jump = false;     // p1 and p2 vanish and the sum ratio holds
  bool big_jump = false;            // p1 vanishes
};
DecompositionReport big_jump_decomposition(const SumQuery& q);  // requires n == 2

// P(X_1 + ... + X_tau > x) against E[sum of c_i up to tau] * F̄(x).
McTable random_sum_tail(const CondIndepModel& model, const TauLaw& tau,
                        const std::vector<double>& x_grid, std::uint64_t replications,
                        std::uint64_t seed, Estimator estimator = Estimator::cond_last_step,
                        int threads = 0);

// Geometric-growth probe: per-n sup over the grid of P(S_n > x)/F̄(x), the
// fitted envelope constant V, and the growth slope of log sup-ratio in n.
// The probe measures growth; it cannot falsify the existential bound.
struct KestenRow {
  int n = 0;
  double sup_ratio = 0.0;
  double x_at_sup = 0.0;
  double se_at_sup = 0.0;
};
struct KestenReport {
  double eps = 0.0;
  double x0 = 0.0;
  double v_fitted = 0.0;
  bool bound_ok = false;
  double slope = 0.0;        // least-squares slope of log sup-ratio vs n
  double slope_limit = 0.0;  // log(1 + eps)
  std::vector<KestenRow> per_n;
  std::vector<std::string> notes;
  std::string limitation =
      "fitted V is empirical; the probe measures growth and cannot falsify the bound";
};
KestenReport kesten_probe(const CondIndepModel& model, double eps, int n_max, double x0,
                          const std::vector<double>& x_grid, std::uint64_t replications,
                          std::uint64_t seed, int threads = 0);

int resolve_threads(int requested);

}  // namespace bigjump
