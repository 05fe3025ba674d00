// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigjump/grid.hpp"

using namespace bigjump;

namespace {
ConvergenceTable table_of(const std::vector<double>& xs, const std::function<double(double)>& f,
                          double ci = 0.0) {
  ConvergenceTable t;
  for (double x : xs) t.push(x, f(x), ci);
  return t;
}
}  // namespace

TEST_CASE("geometric grid shape") {
  const auto g = geometric_grid(1e2, 1e8, 31);
  CHECK(g.size() == 31);
  CHECK(g.front() == 1e2);
  CHECK(g.back() == 1e8);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // Decade alignment: 5 points per decade puts exact powers of ten on-grid.
  CHECK(g[5] == doctest::Approx(1e3).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_grid(-1.0, 10.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(1.0, 10.0, 1), std::invalid_argument);
}

TEST_CASE("limit classification toward a fixed target") {
  const auto g = geometric_grid(1e2, 1e8, 25);

  SUBCASE("clean convergence to zero") {
    auto v = classify_limit_to_target(table_of(g, [](double x) { return 5.0 / x; }), 0.0);
    CHECK(v.verdict == Verdict::converges_to_target);
    CHECK(v.vanishes());
  }
  SUBCASE("constant away from the target diverges") {
    auto v = classify_limit_to_target(table_of(g, [](double) { return 0.5; }), 0.0);
    CHECK(v.verdict == Verdict::diverges);
  }
  SUBCASE("growth diverges") {
    auto v = classify_limit_to_target(table_of(g, [](double x) { return std::sqrt(x); }), 0.0);
    CHECK(v.verdict == Verdict::diverges);
  }
  SUBCASE("slow shrink that has not arrived is inconclusive") {
    auto v = classify_limit_to_target(table_of(g, [](double x) { return 5.0 / std::log10(x); }), 0.0);
    CHECK(v.verdict == Verdict::inconclusive);
  }
  SUBCASE("wide error bars cannot rescue a large value") {
    auto v = classify_limit_to_target(table_of(g, [](double) { return 0.9; }, 0.5), 0.0);
    CHECK(v.verdict != Verdict::converges_to_target);
  }
  SUBCASE("noise floor below tolerance converges without monotonicity") {
    auto t = table_of(g, [](double x) { return 1e-15 * std::sin(x); });
    CHECK(classify_limit_to_target(t, 0.0).vanishes());
  }
}

TEST_CASE("stabilized-limit detection") {
  const auto g = geometric_grid(1e2, 1e8, 25);
  SUBCASE("constant") {
    auto v = classify_stabilized(table_of(g, [](double) { return 2.25; }));
    CHECK(v.verdict == Verdict::converges_to_target);
    CHECK(v.target == doctest::Approx(2.25));
    CHECK(v.converged_to(2.25, 1e-6));
    CHECK_FALSE(v.converged_to(1.0, 1e-3));
  }
  SUBCASE("settling") {
    auto v = classify_stabilized(table_of(g, [](double x) { return 1.0 + 2.0 / x; }));
    CHECK(v.converged_to(1.0, 1e-3));
  }
  SUBCASE("growing diverges") {
    auto v = classify_stabilized(table_of(g, [](double x) { return std::pow(x, 0.3); }));
    CHECK(v.verdict == Verdict::diverges);
  }
  SUBCASE("slow drift is inconclusive") {
    auto v = classify_stabilized(table_of(g, [](double x) { return 1.0 + 2.0 / std::log10(x); }));
    CHECK(v.verdict == Verdict::inconclusive);
  }
}

TEST_CASE("log-log slope") {
  const auto g = geometric_grid(1e2, 1e8, 25);
  CHECK(log_slope_last_decades(table_of(g, [](double x) { return 3.0 * std::pow(x, -0.7); })) ==
        doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(log_slope_last_decades(table_of(g, [](double) { return 42.0; })) ==
        doctest::Approx(0.0).epsilon(1e-9));
}
