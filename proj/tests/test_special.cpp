// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigjump/special.hpp"
#include "oracle_support.hpp"

using namespace bigjump;

TEST_CASE("exponential integral matches its quadrature oracle") {
  // Anchor value first, then full precision against the independent oracle.
  CHECK(std::abs(expint_e1(1.0) - 0.21938) <= 5e-6);
  CHECK(std::abs(expint_e1(1.0) - oracle::expint_e1_oracle(1.0)) <= 1e-12);

  for (double x : {1e-3, 1e-2, 0.1, 0.5, 1.0, 1.09, 1.1, 1.11, 2.0, 5.0, 10.0, 50.0, 100.0}) {
    CAPTURE(x);
    CHECK(std::abs(expint_e1(x) - oracle::expint_e1_oracle(x)) <= 1e-12);
  }
  // Deep tail: compare in relative terms (values near 1e-300).
  for (double x : {300.0, 500.0, 700.0}) {
    CAPTURE(x);
    const double o = oracle::expint_e1_oracle(x);
    CHECK(std::abs(expint_e1(x) - o) <= 1e-12 * std::max(1.0, o) + 1e-300);
    CHECK(expint_e1(x) == doctest::Approx(o).epsilon(1e-10));
  }
}

TEST_CASE("exponential integral frozen values") {
  // Frozen after verifying against the oracle above.
  CHECK(expint_e1(2.0) == doctest::Approx(0.048900510708061).epsilon(1e-12));
  const double e1_10 = expint_e1(10.0);
  CHECK(e1_10 > std::exp(-10.0) / 11.0);  // classical bracket
  CHECK(e1_10 < std::exp(-10.0) / 10.0);
}

TEST_CASE("exponential integral domain") {
  CHECK_THROWS_AS(expint_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(expint_e1(-1.0), std::domain_error);
  CHECK(expint_e1(800.0) == 0.0);  // underflow region
}

TEST_CASE("normal helpers") {
  CHECK(normal_tail(0.0) == doctest::Approx(0.5));
  CHECK(normal_tail(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));

  // Quantile/tail round trip.
  for (double p : {1e-12, 1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-6}) {
    CAPTURE(p);
    const double z = normal_quantile(p);
    CHECK(1.0 - normal_tail(z) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);

  // log tail: continuity across the asymptotic switch and against erfc.
  for (double z : {1.0, 5.0, 10.0, 20.0, 30.0, 34.9, 35.1, 36.5}) {
    CAPTURE(z);
    const double direct = std::log(normal_tail(z));
    CHECK(log_normal_tail(z) == doctest::Approx(direct).epsilon(1e-10));
  }
  // Far beyond underflow it must stay finite and ordered.
  CHECK(std::isfinite(log_normal_tail(100.0)));
  CHECK(log_normal_tail(101.0) < log_normal_tail(100.0));
}
