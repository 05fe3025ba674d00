// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library surface the way an external consumer would:
// through bigjump.h only (plus a JSON parser for inspecting reports).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "bigjump/bigjump.h"

TEST_CASE("version and status names") {
  CHECK(bigjump_version() != nullptr);
  CHECK(std::strcmp(bigjump_status_name(BIGJUMP_OK), "ok") == 0);
  CHECK(std::strcmp(bigjump_status_name(BIGJUMP_ERR_NO_BOUNDARY_CLASS), "no_boundary_class") == 0);
}

TEST_CASE("exponential integral through the C surface") {
  double v = 0.0;
  REQUIRE(bigjump_expint_e1(1.0, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(0.21938).epsilon(1e-4));
  CHECK(bigjump_expint_e1(-1.0, &v) == BIGJUMP_ERR_DOMAIN);
  CHECK(std::strlen(bigjump_last_error()) > 0);
  CHECK(bigjump_expint_e1(1.0, nullptr) == BIGJUMP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("law handles") {
  bigjump_law* law = nullptr;
  REQUIRE(bigjump_law_create(R"({"name":"pareto","params":{"alpha":2.0}})", &law) == BIGJUMP_OK);
  double v = 0.0;
  CHECK(bigjump_law_tail(law, 10.0, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(0.01));
  CHECK(bigjump_law_log_tail(law, 10.0, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(std::log(0.01)));
  CHECK(bigjump_law_hazard(law, std::exp(1.0), &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(2.0));
  CHECK(bigjump_law_hazard_rate(law, 5.0, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(0.4));
  CHECK(bigjump_law_quantile(law, 0.01, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(10.0));
  CHECK(bigjump_law_support_lower(law, &v) == BIGJUMP_OK);
  CHECK(v == 1.0);
  CHECK(bigjump_law_hazard_rate(law, 0.5, &v) == BIGJUMP_ERR_DOMAIN);

  double draws_a[32], draws_b[32];
  CHECK(bigjump_law_sample(law, 7, 32, draws_a) == BIGJUMP_OK);
  CHECK(bigjump_law_sample(law, 7, 32, draws_b) == BIGJUMP_OK);
  for (int i = 0; i < 32; ++i) {
    CHECK(draws_a[i] == draws_b[i]);
    CHECK(draws_a[i] >= 1.0);
  }

  CHECK(bigjump_law_boundary_generator(law, 100.0, &v) == BIGJUMP_OK);
  CHECK(v == doctest::Approx(50.0));
  bigjump_law_free(law);

  bigjump_law* slow = nullptr;
  REQUIRE(bigjump_law_create(R"({"name":"slowly_varying_log_tail","params":{"k":0.25}})", &slow) ==
          BIGJUMP_OK);
  CHECK(bigjump_law_boundary_generator(slow, 100.0, &v) == BIGJUMP_ERR_NO_BOUNDARY_CLASS);
  bigjump_law_free(slow);

  bigjump_law* bad = nullptr;
  CHECK(bigjump_law_create("{not json", &bad) == BIGJUMP_ERR_INVALID_ARGUMENT);
  CHECK(bigjump_law_create(R"({"name":"nope"})", &bad) == BIGJUMP_ERR_CONFIG);
  CHECK(bigjump_law_create(R"({"name":"weibull","params":{"gamma":1.0,"beta":-1.0}})", &bad) ==
        BIGJUMP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("model handles") {
  bigjump_model* model = nullptr;
  REQUIRE(bigjump_model_create(R"({"name":"pareto_mixture","params":{"n":2}})", &model) ==
          BIGJUMP_OK);
  int n = 0;
  CHECK(bigjump_model_n_max(model, &n) == BIGJUMP_OK);
  CHECK(n == 2);
  int rv = 1;
  CHECK(bigjump_model_real_valued(model, &rv) == BIGJUMP_OK);
  CHECK(rv == 0);
  double t = 0.0;
  CHECK(bigjump_model_reference_tail(model, 1e3, &t) == BIGJUMP_OK);
  CHECK(t == doctest::Approx((1.0 / 1001 - 1.0 / (1001.0 * 1001.0)) / std::log(1001.0))
                 .epsilon(1e-12));

  double latent[4];
  size_t written = 0;
  CHECK(bigjump_model_sample_latent(model, 3, latent, 4, &written) == BIGJUMP_OK);
  CHECK(written == 1);
  CHECK(latent[0] > 1.0);
  CHECK(latent[0] < 2.0);
  double ct = 0.0;
  CHECK(bigjump_model_cond_tail(model, 0, 9.0, latent, written, &ct) == BIGJUMP_OK);
  CHECK(ct == doctest::Approx(std::pow(10.0, -latent[0])));
  CHECK(bigjump_model_cond_tail(model, 5, 9.0, latent, written, &ct) ==
        BIGJUMP_ERR_INVALID_ARGUMENT);
  size_t w2 = 0;
  CHECK(bigjump_model_sample_latent(model, 3, latent, 0, &w2) == BIGJUMP_ERR_INVALID_ARGUMENT);
  bigjump_model_free(model);

  bigjump_model* mv = nullptr;
  REQUIRE(bigjump_model_create(R"({"name":"moving_average","params":{"alpha":2.0,"beta":1.5}})",
                               &mv) == BIGJUMP_OK);
  CHECK(bigjump_model_real_valued(mv, &rv) == BIGJUMP_OK);
  CHECK(rv == 1);
  bigjump_model_free(mv);

  bigjump_model* bad = nullptr;
  CHECK(bigjump_model_create(R"({"name":"additive_shock","params":{"alpha":1.0,"beta":1.0}})",
                             &bad) == BIGJUMP_ERR_UNSUPPORTED);
}

TEST_CASE("one-shot runner") {
  const char* cfg = R"({
    "command": "simulate",
    "model": {"name": "pareto_mixture", "params": {"n": 2}},
    "n": 2,
    "x_grid": {"start": 100.0, "stop": 1000.0, "points": 3},
    "replications": 20000,
    "seed": 5
  })";
  char* rep_a = nullptr;
  char* rep_b = nullptr;
  REQUIRE(bigjump_run(cfg, &rep_a) == BIGJUMP_OK);
  REQUIRE(bigjump_run(cfg, &rep_b) == BIGJUMP_OK);
  const auto ja = nlohmann::json::parse(rep_a);
  const auto jb = nlohmann::json::parse(rep_b);
  CHECK(ja["exit_code"] == 0);
  CHECK(ja["csv"] == jb["csv"]);
  CHECK(ja["csv"].get<std::string>().rfind("x,n_or_tau,estimator,", 0) == 0);
  CHECK(ja["tables"][0]["rows"].size() == 3);
  bigjump_free_string(rep_a);
  bigjump_free_string(rep_b);

  char* out = nullptr;
  CHECK(bigjump_run("{bad", &out) == BIGJUMP_ERR_INVALID_ARGUMENT);
  // Config-level errors surface inside the report, not as a C error.
  REQUIRE(bigjump_run(R"({"command":"nope"})", &out) == BIGJUMP_OK);
  const auto je = nlohmann::json::parse(out);
  CHECK(je["exit_code"] == 1);
  bigjump_free_string(out);
}
