// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigjump/simulate.hpp"

using namespace bigjump;

namespace {

struct Preset {
  CondIndepModel model;
  std::vector<double> grid;
};

// Grids sized so the plain estimator still scores hits at the top point.
std::vector<Preset> presets() {
  return {{make_additive_shock(1.0, 2.0, 2), geometric_grid(1e2, 1e4, 5)},
          {make_pareto_mixture(2), geometric_grid(1e2, 1e4, 5)},
          {make_weibull_mixture(0.2, 1.0, 1.0, 2), geometric_grid(1e2, 1e4, 5)},
          {make_weibull_mixture(0.0, 1.0, 1.0, 2), geometric_grid(1e2, 1e6, 5)},
          {make_discount_product(2.0, laws::weibull(1.0, 0.5), 2), geometric_grid(1e1, 1e3, 5)},
          {make_lognormal_copula({1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}), geometric_grid(2.0, 1e2, 5)},
          {make_moving_average(2.0, 1.5, 2), geometric_grid(1e1, 3e2, 5)}};
}

}  // namespace

TEST_CASE("stopping-time laws") {
  const TauLaw g = TauLaw::geometric(0.5);
  CHECK(g.cap() == 10);
  CHECK(g.tail_mass() == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
  double total = 0.0, mean = 0.0;
  for (int k = 0; k <= g.cap(); ++k) {
    total += g.pmf_capped(k);
    mean += k * g.pmf_capped(k);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(g.mean_capped()).epsilon(1e-12));
  CHECK(g.mean_capped() == doctest::Approx(2.0 * (1.0 - std::pow(0.5, 10))).epsilon(1e-9));

  const TauLaw p = TauLaw::poisson(2.0);
  double pt = 0.0;
  for (int k = 0; k <= p.cap(); ++k) pt += p.pmf_capped(k);
  CHECK(pt == doctest::Approx(1.0).epsilon(1e-12));

  const TauLaw f = TauLaw::fixed(3);
  CHECK(f.mean_capped() == 3.0);
  CHECK(f.tail_mass() == 0.0);

  // Sampling matches the capped pmf.
  SplitMix64 rng = make_stream(1, 0, 0);
  std::vector<int> counts(11, 0);
  for (int i = 0; i < 200000; ++i) ++counts[static_cast<std::size_t>(g.sample(rng))];
  CHECK(counts[0] == 0);
  CHECK(std::abs(counts[1] / 200000.0 - 0.5) < 0.005);
  CHECK(counts[10] > 0);

  CHECK(g.expected_c_sum(make_pareto_mixture(10)) ==
        doctest::Approx(g.mean_capped()).epsilon(1e-12));
  CHECK_THROWS_AS(g.expected_c_sum(make_pareto_mixture(4)), std::invalid_argument);
}

TEST_CASE("query validation") {
  SumQuery q;
  q.model = make_pareto_mixture(2);
  q.n = 2;
  q.x_grid = {100.0, 10.0};
  q.replications = 10000;
  CHECK_THROWS_AS(mc_sum_tail(q), std::invalid_argument);  // non-increasing grid
  q.x_grid = {10.0, 100.0};
  q.replications = 10;
  CHECK_THROWS_AS(mc_sum_tail(q), std::invalid_argument);  // too few replications
  q.replications = 10000;
  q.n = 5;
  CHECK_THROWS_AS(mc_sum_tail(q), std::invalid_argument);  // n beyond the model
}

TEST_CASE("plain and conditional estimators agree") {
  for (const auto& [model, grid] : presets()) {
    CAPTURE(model.label());
    SumQuery q;
    q.model = model;
    q.n = 2;
    q.x_grid = grid;
    q.replications = 100000;
    q.seed = 20260811;
    q.estimator = Estimator::plain;
    const McTable plain = mc_sum_tail(q);
    q.estimator = Estimator::cond_last_step;
    const McTable cond = mc_sum_tail(q);

    for (std::size_t i = 0; i < grid.size(); ++i) {
      // Compare only where the indicator estimator carries information.
      if (plain.rows[i].hits < 10) continue;
      const double diff = std::abs(plain.rows[i].estimate - cond.rows[i].estimate);
      const double se = std::hypot(plain.rows[i].se, cond.rows[i].se);
      CAPTURE(grid[i]);
      CHECK(diff <= 3.0 * se + 1e-12);
    }

    // Variance reduction at the rare end of the grid, as measured SEs.
    const McRow& pl = plain.rows.back();
    const McRow& cl = cond.rows.back();
    MESSAGE(model.label(), ": plain se=", pl.se, " cond se=", cl.se, " at x=", pl.x);
    CHECK(cl.se <= pl.se * (1.0 + 1e-12));
  }
}

TEST_CASE("runs are deterministic and worker-count independent") {
  SumQuery q;
  q.model = make_pareto_mixture(2);
  q.n = 2;
  q.x_grid = geometric_grid(1e2, 1e4, 5);
  q.replications = 50000;
  q.seed = 99;
  q.threads = 1;
  const McTable a = mc_sum_tail(q);
  q.threads = 2;
  const McTable b = mc_sum_tail(q);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].estimate == b.rows[i].estimate);  // bit-exact
    CHECK(a.rows[i].se == b.rows[i].se);
    CHECK(a.rows[i].hits == b.rows[i].hits);
  }
}

TEST_CASE("decomposition identity and classification") {
  SUBCASE("identity residual is mean zero for every preset") {
    for (const auto& [model, grid] : presets()) {
      CAPTURE(model.label());
      SumQuery q;
      q.model = model;
      q.n = 2;
      q.x_grid = grid;
      q.replications = 100000;
      q.seed = 7;
      const DecompositionReport d = big_jump_decomposition(q);
      for (const auto& r : d.residual.rows) {
        CAPTURE(r.x);
        CHECK(std::abs(r.estimate) <= 3.0 * r.se + 1e-12);
      }
      // The correction term vanishes identically for non-negative models.
      if (!model.real_valued())
        for (const auto& r : d.p_cancel.rows) CHECK(r.estimate == 0.0);
    }
  }

  SUBCASE("independent power tails obey the one-big-summand split") {
    // With no latent state the conditional estimator degenerates to the
    // indicator, so its effective sample size is ~4 N F̄(x); the budget and
    // grid are sized so the top row stays reliable.
    const auto m = make_independent({laws::pareto(2.0, 1.0), laws::pareto(2.0, 1.0)});
    SumQuery q;
    q.model = m;
    q.n = 2;
    q.x_grid = {1e2, 3e2, 1e3};
    q.replications = 12000000;
    q.seed = 13;
    const DecompositionReport d = big_jump_decomposition(q);
    CHECK(d.p1_vanishes.vanishes());
    CHECK(d.p2_vanishes.vanishes());
    CHECK(d.big_jump);
    CHECK(d.single_big_jump);
  }

  SUBCASE("slowly varying mixture keeps a joint-exceedance fraction") {
    SumQuery q;
    q.model = make_weibull_mixture(0.0, 1.0, 1.0, 2);
    q.n = 2;
    q.x_grid = geometric_grid(1e2, 1e6, 9);
    q.replications = 200000;
    q.seed = 4;
    const DecompositionReport d = big_jump_decomposition(q);
    CHECK(d.big_jump);
    CHECK_FALSE(d.single_big_jump);
    CHECK_FALSE(d.p2_vanishes.vanishes());
    // Joint exceedance against the marginal: the two-E1 constant.
    const auto& p2 = d.p2.rows.back();
    const auto& m1 = d.per_term[0].rows.back();
    CHECK(p2.estimate / m1.estimate ==
          doctest::Approx(expint_e1(2.0) / expint_e1(1.0)).epsilon(0.05));
  }

  SUBCASE("moving average stays below the driver tail") {
    SumQuery q;
    q.model = make_moving_average(2.0, 1.5, 2);
    q.n = 2;
    q.x_grid = {1e2, 1e3};
    q.replications = 400000;
    q.seed = 3;
    const DecompositionReport d = big_jump_decomposition(q);
    for (const auto& r : d.p_sum.rows) {
      const double fbar = q.model.reference().tail(r.x);
      const double rel_ci = 0.5 * (r.hi - r.lo) / fbar;
      CHECK(r.estimate / fbar <= 1.0 + 3.0 * rel_ci);
    }
    CHECK_FALSE(d.single_big_jump);
  }

  SUBCASE("requires n = 2") {
    SumQuery q;
    q.model = make_pareto_mixture(3);
    q.n = 3;
    q.x_grid = {100.0};
    q.replications = 10000;
    CHECK_THROWS_AS(big_jump_decomposition(q), std::invalid_argument);
  }
}

TEST_CASE("random sums") {
  const auto m = make_pareto_mixture(10);

  SUBCASE("a unit count reduces exactly to the marginal run") {
    const auto rs = random_sum_tail(m, TauLaw::fixed(1), {1e2, 1e3}, 20000, 5);
    SumQuery q;
    q.model = m;
    q.n = 1;
    q.x_grid = {1e2, 1e3};
    q.replications = 20000;
    q.seed = 5;
    const auto direct = mc_sum_tail(q);
    for (std::size_t i = 0; i < rs.rows.size(); ++i)
      CHECK(rs.rows[i].estimate == direct.rows[i].estimate);  // shared streams
  }

  SUBCASE("a degenerate count matches the fixed-n engine") {
    const auto rs = random_sum_tail(m, TauLaw::fixed(3), {1e2, 1e3}, 20000, 6);
    SumQuery q;
    q.model = m;
    q.n = 3;
    q.x_grid = {1e2, 1e3};
    q.replications = 20000;
    q.seed = 6;
    const auto direct = mc_sum_tail(q);
    for (std::size_t i = 0; i < rs.rows.size(); ++i)
      CHECK(rs.rows[i].estimate == direct.rows[i].estimate);
  }

  SUBCASE("geometric count hits the mean-count target") {
    const auto rs = random_sum_tail(m, TauLaw::geometric(0.5), {1e3}, 200000, 11);
    const McRow& r = rs.rows.front();
    const double rel_ci = 0.5 * (r.hi - r.lo) / r.target;
    CHECK(std::abs(r.ratio - 1.0) <= 3.0 * rel_ci);
  }
}

TEST_CASE("growth probe") {
  SUBCASE("single summand recovers the marginal-to-reference ratio") {
    const KestenReport k = kesten_probe(make_pareto_mixture(10), 0.5, 3, 1e2,
                                        geometric_grid(1e2, 1e4, 5), 20000, 21);
    REQUIRE(k.per_n.size() == 3);
    CHECK(k.per_n[0].sup_ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(k.bound_ok);
    CHECK(k.v_fitted > 0.0);
    CHECK(k.limitation.find("cannot falsify") != std::string::npos);
  }
  SUBCASE("shared heavy shock grows the envelope with n") {
    const KestenReport k = kesten_probe(make_additive_shock(2.0, 1.0, 8), 0.5, 4, 1e2,
                                        geometric_grid(1e2, 1e3, 3), 50000, 22);
    REQUIRE(k.per_n.size() == 4);
    CHECK(k.bound_ok);  // some finite envelope always fits a finite probe
    const double growth = k.per_n[3].sup_ratio / k.per_n[0].sup_ratio;
    CHECK(growth > 2.0);
    CHECK(growth < 8.0);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(kesten_probe(make_pareto_mixture(2), 0.0, 2, 1e2, {1e3}, 10000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(kesten_probe(make_pareto_mixture(2), 0.5, 25, 1e2, {1e3}, 10000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(kesten_probe(make_pareto_mixture(2), 0.5, 2, 1e5, {1e3}, 10000, 1),
                    std::invalid_argument);
  }
}
