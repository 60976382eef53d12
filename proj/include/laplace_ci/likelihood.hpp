#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "laplace_ci/errors.hpp"
#include "laplace_ci/specfun.hpp"

namespace laplace_ci {

/// A record of x successes in n Bernoulli trials (n >= 1, 0 <= x <= n).
class Observation {
 public:
  Observation(std::int64_t trials, std::int64_t successes) : n_(trials), x_(successes) {
    if (n_ < 1) throw domain_error("n must be at least 1");
    if (x_ < 0) throw domain_error("x must be non-negative");
    if (x_ > n_) throw domain_error("x must not exceed n");
  }

  std::int64_t trials() const noexcept { return n_; }
  std::int64_t successes() const noexcept { return x_; }
  std::int64_t failures() const noexcept { return n_ - x_; }

  /// The observation with successes and failures swapped.
  Observation reflected() const { return {n_, n_ - x_}; }

  friend bool operator==(const Observation&, const Observation&) = default;
  friend auto operator<=>(const Observation&, const Observation&) = default;

 private:
  std::int64_t n_;
  std::int64_t x_;
};

namespace detail {

// count * ln(value) with 0 * ln 0 = 0.
inline double weighted_log(std::int64_t count, double value) {
  if (count == 0) return 0.0;
  return static_cast<double>(count) * std::log(value);
}

}  // namespace detail

/// ln L(p; n, x) = ln C(n, x) + x ln p + (n - x) ln(1 - p).
///
/// Boundary terms with a zero count vanish, so the likelihood at p = 0 is 1
/// for x = 0 and 0 (log -inf) otherwise; symmetrically at p = 1.
inline double log_likelihood(const Observation& obs, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("log_likelihood: p must lie in [0, 1]");
  const double success_term = detail::weighted_log(obs.successes(), p);
  const double failure_term = detail::weighted_log(obs.failures(), 1.0 - p);
  return specfun::ln_choose(obs.trials(), obs.successes()) + (success_term + failure_term);
}

/// x ln(x/n) + (n - x) ln((n - x)/n): the log of L / C(n, x) at its mode.
inline double log_kernel_at_mode(const Observation& obs) {
  const double n = static_cast<double>(obs.trials());
  return detail::weighted_log(obs.successes(), static_cast<double>(obs.successes()) / n) +
         detail::weighted_log(obs.failures(), static_cast<double>(obs.failures()) / n);
}

/// Maximum-likelihood estimate x / n.
inline double mle_estimate(const Observation& obs) {
  return static_cast<double>(obs.successes()) / static_cast<double>(obs.trials());
}

/// Laplace-smoothed estimate (x + 1) / (n + 2), the posterior mean under a
/// uniform prior. Always strictly inside (0, 1).
inline double laplace_estimate(const Observation& obs) {
  return static_cast<double>(obs.successes() + 1) / static_cast<double>(obs.trials() + 2);
}

/// ∫₀¹ L(p; n, x) dp = 1 / (n + 1), independent of x.
inline double analytic_total_mass(std::int64_t n) {
  if (n < 1) throw domain_error("analytic_total_mass: n must be at least 1");
  return 1.0 / static_cast<double>(n + 1);
}

}  // namespace laplace_ci
