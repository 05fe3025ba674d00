// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bigjump/dist.hpp"
#include "bigjump/grid.hpp"

namespace bigjump {

// Candidate insensitivity function h: non-decreasing, 0 < h(x) < x/2 above a
// threshold, h -> infinity.
struct LittleH {
  std::function<double(double)> fn;
  std::string label;
};

// Generator H of the boundary family {c H(x)}: h is admissible iff
// h = o(H). `multiples` is the default multiple set for condition checks,
// filtered per grid point against c H(x) < x/2.
struct BoundaryGenerator {
  std::function<double(double)> base;
  std::string label;
  std::vector<double> multiples;  // default {2^k : k = -6..1}
};

std::vector<double> default_multiples();

// Default evaluation grid for deterministic asymptotic checks.
std::vector<double> default_boundary_grid();

// True when every admissible h passes the insensitivity test, i.e. the law is
// slowly varying. Implemented as the h(x) = x/4 probe.
bool is_slowly_varying(const TailDistribution& dist, std::span<const double> xgrid);

// H(x) = 1 / hazard_rate(x). Throws NoBoundaryClassError for slowly varying
// laws, which admit every h and hence have no boundary family.
BoundaryGenerator boundary_generator(const TailDistribution& dist);

// Tests lim F̄(x - h(x)) / F̄(x) = 1 on the grid (log-space ratios). The
// verdict reports the stabilized limit; h belongs to the insensitivity class
// iff that limit is 1 within 1e-3. Throws std::invalid_argument when h
// violates the LittleH shape constraints on the grid.
LimitVerdict is_little_h(const TailDistribution& dist, const LittleH& h,
                         std::span<const double> xgrid);

// Convenience: the boolean decision derived from is_little_h.
bool little_h_passes(const LimitVerdict& v);

// Ratio f/g bounded inside [1/K, K] over the last three decades with no
// monotone drift (|log-log slope| < 0.05), K = 100.
bool weak_equiv(const std::function<double(double)>& f,
                const std::function<double(double)>& g, std::span<const double> xgrid);

// h = o(H) decided by the trend of h/H over the last three decades: slope
// <= -0.02 and monotone decrease. Must agree with is_little_h wherever both
// are decisive. Propagates NoBoundaryClassError.
bool membership_via_boundary(const TailDistribution& dist, const LittleH& h,
                             std::span<const double> xgrid);

}  // namespace bigjump
