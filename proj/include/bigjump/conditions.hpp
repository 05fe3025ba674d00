// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bigjump/boundary.hpp"
#include "bigjump/dist.hpp"
#include "bigjump/grid.hpp"
#include "bigjump/types.hpp"

namespace bigjump {

class CondIndepModel;  // models.hpp

// Dependence-control data for a model: the conditional-tail cap r(x), the
// complement probability of the bounding sets, and the set indicator itself
// (needed for the exact almost-sure inequality checks on latent grids).
struct BoundingSpec {
  std::function<double(double)> r;       // non-decreasing cap, eventually monotone
  std::function<double(double)> b_tail;  // x -> P(latent outside the bounding set at level x)
  std::function<bool(int, double, const Latent&)> in_set;  // (i, x, latent) membership
  std::string label;
};

struct D3Verdicts {
  LimitVerdict d3i;   // P(outside bounding set at h(x)) / F̄(x) -> 0
  LimitVerdict d3ii;  // r(x) F̄(h(x)) -> 0
  LimitVerdict d3iii; // r(x) * intermediate_integral(F, h, x) / F̄(x) -> 0
  bool all_pass() const;
};

struct ConditionReport {
  std::map<double, D3Verdicts> per_multiple;  // keyed by multiple c
  D3Verdicts headline;                        // smallest feasible multiple (hardest case)
  bool overall = false;                       // all three vanish for every tested multiple
  std::vector<std::string> notes;             // skipped multiples etc.
  // The almost-sure inequality is only checkable on a latent grid; reports say so.
  std::string qualifier = "eq-4 cap checked on latent grid";
};

// Limit of F̄_i(x)/F̄(x) (the asymptotic-equivalence constant). The verdict's
// target is the stabilized value; also fails when the domination clause
// F̄_i <= c F̄ is violated by upward drift.
LimitVerdict estimate_c(const TailDistribution& Fi, const TailDistribution& Fref,
                        std::span<const double> xgrid);

// Eventual domination F̄_i(x) <= c F̄(x): the grid tail ratio must be finite
// and free of upward drift over the last three decades.
bool check_d2_domination(const TailDistribution& Fi, const TailDistribution& Fref,
                         std::span<const double> xgrid);

// Full three-part dependence check over every feasible multiple of the
// boundary generator. A multiple is skipped (with a note) when c H(x) >= x/2
// on all but the first decades of the grid.
ConditionReport check_d3(const BoundingSpec& bound, const TailDistribution& F,
                         const BoundaryGenerator& H, std::span<const double> xgrid,
                         double vanish_tol = 1e-2);

enum class HazardSufficiency { holds, fails, indeterminate };

// Sufficient condition: the hazard Q = -log F̄ eventually concave (second
// differences <= relative slack 1e-9) and x r(x) F̄(c H(x)) -> 0 for every
// multiple. `indeterminate` means the concavity test could not be resolved at
// grid precision; callers fall back to check_d3.
HazardSufficiency hazard_concavity_sufficient(const TailDistribution& F,
                                              const std::function<double(double)>& r,
                                              const BoundaryGenerator& H,
                                              std::span<const double> xgrid);

// Real-valued dependence condition: P(X_i > x + h(x), X_j <= -h(x)) / F̄(x)
// estimated by conditional Monte Carlo (product of conditional tails given the
// latent state). Rows whose effective sample size collapses are dropped with
// a note; target 0.
LimitVerdict check_d4(const CondIndepModel& model, const LittleH& h, int i, int j,
                      std::span<const double> xgrid, std::uint64_t replications,
                      std::uint64_t seed);

}  // namespace bigjump
