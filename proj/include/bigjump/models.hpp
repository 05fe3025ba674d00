// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bigjump/conditions.hpp"
#include "bigjump/dist.hpp"
#include "bigjump/rng.hpp"
#include "bigjump/types.hpp"

namespace bigjump {

namespace detail {
class ModelImpl;
}

// A family of summands that are independent given a latent state, with
// reference law, equivalence constants and a preset bounding specification.
// Immutable value handle; all sampling goes through caller-owned rng streams.
class CondIndepModel {
 public:
  CondIndepModel() = default;
  explicit CondIndepModel(std::shared_ptr<const detail::ModelImpl> impl);

  int n_max() const;
  bool real_valued() const;
  // False when the construction is known to break the one-big-summand
  // asymptotics (used only for reporting, never for verdicts).
  bool single_big_jump_expected() const;

  const TailDistribution& reference() const;
  // Asymptotic constants of the marginal tails against the reference; c_exact
  // is false when the marginals are only weakly equivalent to the reference.
  const std::vector<double>& c() const;
  bool c_exact() const;

  const std::optional<BoundingSpec>& bounding() const;

  Latent sample_latent(SplitMix64& rng) const;
  // P(X_i > x | latent), in [0,1], non-increasing in x. i is 0-based.
  double cond_tail(int i, double x, const Latent& latent) const;
  double cond_sample(int i, const Latent& latent, SplitMix64& rng) const;

  // P(X_i <= t | latent); separate from cond_tail so real-valued models can
  // serve the negative side exactly.
  double cond_cdf(int i, double t, const Latent& latent) const;

  // Deterministic quantile-spaced latent states covering the latent law
  // (coordinate j offset by the golden ratio so vector latents spread).
  std::vector<Latent> latent_grid(int points) const;

  const std::string& label() const;
  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const detail::ModelImpl> impl_;
};

// X_i = xi_i + eta with xi_i ~ pareto(alpha), eta ~ pareto(beta), shared eta.
// Reference pareto(min(alpha,beta)); bounding set {eta <= x/2}, r = 2^beta.
// alpha == beta is unsupported.
CondIndepModel make_additive_shock(double alpha, double beta, int n);

// Conditionally iid with tail (1+x)^-eta given eta ~ U(1,2); reference is the
// exact mixture marginal, r(x) = 2 log(1+x), full-space bounding set.
CondIndepModel make_pareto_mixture(int n);

// Conditionally iid Weibull(gamma, beta) given beta ~ U(a,b), 0 <= a < b <= 1.
// a > 0: reference exp(-gamma x^a)/((b-a) gamma x^a log x), r = gamma (b-a)
// x^a log x. a = 0: reference E1(gamma)/(b log x) (slowly varying, no boundary
// class, no valid bounding preset) and single_big_jump_expected() is false.
CondIndepModel make_weibull_mixture(double a, double b, double gamma, int n);

// X_i = xi_i * eta_1 ... eta_i with xi ~ pareto(xi_alpha), eta rapidly
// varying (default weibull(1, 0.5)); n <= 8. Bounding set {prod eta <=
// x^(1-eps)} with eps the smallest value in {0.1..0.9} making the factor tail
// negligible; r(x) = F̄_xi(x^eps)/F̄_xi(x).
CondIndepModel make_discount_product(double xi_alpha, const TailDistribution& eta_law, int n);

// X_i = exp(s_i W + Z_i), W standard normal shared, Z_i ~ N(mu_i, sigma_i^2).
// Reference lognormal(max mu, sqrt(max s^2 + max sigma^2)).
CondIndepModel make_lognormal_copula(const std::vector<double>& s,
                                     const std::vector<double>& mu,
                                     const std::vector<double>& sigma);

// X_i = Z_i - Y_i Z_{i-1} with pareto(alpha) Z's and pareto(beta) Y's,
// alpha > beta > 1; real-valued. Latent state is the vector of products
// Y_k Z_{k-1}; the conditional law of Z given Y Z = w has the closed ratio
// form bounded by x^beta.
CondIndepModel make_moving_average(double alpha, double beta, int n);

// Independent summands with a degenerate latent state: the no-dependence
// baseline. Summand i follows laws_vec[i]; the first law doubles as the
// reference. Laws only need samplers where the plain estimator is used.
CondIndepModel make_independent(const std::vector<TailDistribution>& laws_vec);

// Preset registry for the CLI: name plus parameter map ("n" counts summands).
CondIndepModel model_from_name(const std::string& name,
                               const std::map<std::string, double>& params);

// Conditional law P(Z > t | Y Z = w) of the moving-average model (exposed for
// direct inequality checks).
double moving_average_cond_tail(double alpha, double beta, double t, double w);

// Law of the product Y Z of independent pareto(beta) and pareto(alpha)
// variables: P(Y Z > w) = (alpha w^-beta - beta w^-alpha)/(alpha - beta).
TailDistribution pareto_product_law(double alpha, double beta);

// Law of eta_1 ... eta_k (iid factors), tabulated by k-fold log-space
// convolution of tail-difference cell masses. Tail/log-tail only.
TailDistribution product_factor_law(const TailDistribution& eta, int k_factors);

}  // namespace bigjump
