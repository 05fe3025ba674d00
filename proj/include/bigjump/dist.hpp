// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "bigjump/rng.hpp"
#include "bigjump/special.hpp"

namespace bigjump {

namespace detail {
class LawImpl;
}

// Immutable heavy-tailed law described through its tail. Value-semantic
// handle; safe to copy and share across threads.
class TailDistribution {
 public:
  TailDistribution() = default;
  explicit TailDistribution(std::shared_ptr<const detail::LawImpl> impl);

  // F̄(x). Exactly 1 for x <= support_lower, non-increasing, -> 0.
  double tail(double x) const;
  // log F̄(x); closed form where the law has one, log(tail) otherwise.
  double log_tail(double x) const;
  // Hazard Q(x) = -log F̄(x). Throws if the tail is identically zero there.
  double hazard(double x) const;
  // Hazard rate q(x) = f(x)/F̄(x). Uses the closed-form density when the law
  // has one; otherwise a centered difference of Q with relative step 1e-4.
  // Requires x > support_lower.
  double hazard_rate(double x) const;

  bool has_density() const;
  double density(double x) const;  // throws std::logic_error if !has_density
  // log f(x); closed form where the law has one, so far-tail integrands can
  // be assembled without underflow.
  double log_density(double x) const;

  // x with F̄(x) = u, u in (0,1). Closed form where available, else monotone
  // bisection on the tail (deterministic).
  double quantile(double u) const;

  // Inverse-transform draw (one uniform), or the law's dedicated sampler.
  double sample(SplitMix64& rng) const;

  double support_lower() const;
  const std::string& label() const;

  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const detail::LawImpl> impl_;
};

namespace laws {

// P(X > x) = (x/xmin)^-alpha for x >= xmin.
TailDistribution pareto(double alpha, double xmin = 1.0);
// P(X > x) = exp(-gamma x^beta) for x > 0.
TailDistribution weibull(double gamma, double beta);
// X = exp(mu + sigma N). sigma is the standard deviation of log X.
TailDistribution lognormal(double mu, double sigma);
// P(X > x) = exp(-gamma (log x)^alpha) for x >= 1; alpha = 1 is Pareto(gamma).
TailDistribution log_weibull(double gamma, double alpha);
// Unconditional law of the uniform(1,2)-exponent bounded Pareto mixture:
// P(X > x) = ((1+x)^-1 - (1+x)^-2) / log(1+x).
TailDistribution bounded_pareto_mixture_marginal();
// Unconditional law of the Weibull mixture with shape drawn uniform(a,b):
// P(X > x) = (E1(gamma x^a) - E1(gamma x^b)) / ((b-a) log x).
TailDistribution weibull_mixture_marginal(double a, double b, double gamma);
// P(X > x) = k / log x for x >= e^k (slowly varying; no boundary class).
TailDistribution slowly_varying_log_tail(double k);

// Custom law from a tail function. support_lower must satisfy tail(x)=1 for
// x <= support_lower. Optional closed-form log-tail improves far-tail checks.
TailDistribution from_functions(std::string label, double support_lower,
                                std::function<double(double)> tail,
                                std::function<double(double)> log_tail = nullptr,
                                std::function<double(double)> density = nullptr);

// Constructor registry for the CLI config: label plus a parameter map.
TailDistribution from_name(const std::string& name,
                           const std::map<std::string, double>& params);

}  // namespace laws

}  // namespace bigjump
