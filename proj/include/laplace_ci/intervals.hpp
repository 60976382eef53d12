#pragma once

// Interval estimates for a binomial proportion: the equal-tailed interval of
// the normalized likelihood found by Simpson quadrature (the interval of the
// Laplace-smoothed estimate), its one-sided variant, the normal
// approximation, and Clopper-Pearson. Also the normal-approximation
// applicability checklist.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "laplace_ci/errors.hpp"
#include "laplace_ci/format.hpp"
#include "laplace_ci/likelihood.hpp"
#include "laplace_ci/precision.hpp"
#include "laplace_ci/quadrature.hpp"
#include "laplace_ci/specfun.hpp"

namespace laplace_ci {

/// Two-sided miss probability; the confidence level is 1 - alpha.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) throw domain_error("alpha must lie in (0, 1)");
  }
  double value() const noexcept { return value_; }
  double confidence() const noexcept { return 1.0 - value_; }
  friend bool operator==(const Alpha&, const Alpha&) = default;
  friend auto operator<=>(const Alpha&, const Alpha&) = default;

 private:
  double value_;
};

enum class Method { exact_numeric, normal, clopper_pearson };

inline constexpr std::array<Method, 3> all_methods = {Method::clopper_pearson, Method::exact_numeric, Method::normal};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::exact_numeric:
      return "exact-numeric";
    case Method::normal:
      return "normal";
    case Method::clopper_pearson:
      return "clopper-pearson";
  }
  return "unknown";
}

/// Accepts the canonical names plus the short forms "exact" and "cp".
inline Method parse_method(std::string_view name) {
  if (name == "exact-numeric" || name == "exact") return Method::exact_numeric;
  if (name == "normal") return Method::normal;
  if (name == "clopper-pearson" || name == "cp") return Method::clopper_pearson;
  throw domain_error("unknown method '" + std::string(name) + "'");
}

/// Which tails the interval leaves open.
enum class Tail { two_sided, upper_bound, lower_bound };

/// Range flags; each is set exactly when its numeric condition holds.
enum class IntervalFlag : unsigned {
  lower_out_of_range = 1u << 0,  // lower < 0 or lower > 1
  upper_out_of_range = 1u << 1,  // upper < 0 or upper > 1
  lower_degenerate_zero = 1u << 2,  // lower == 0
  upper_degenerate_one = 1u << 3,  // upper == 1
};

inline constexpr std::array<IntervalFlag, 4> all_flags = {
    IntervalFlag::lower_out_of_range, IntervalFlag::upper_out_of_range, IntervalFlag::lower_degenerate_zero,
    IntervalFlag::upper_degenerate_one};

inline std::string_view flag_name(IntervalFlag f) {
  switch (f) {
    case IntervalFlag::lower_out_of_range:
      return "lower-out-of-range";
    case IntervalFlag::upper_out_of_range:
      return "upper-out-of-range";
    case IntervalFlag::lower_degenerate_zero:
      return "lower-degenerate-zero";
    case IntervalFlag::upper_degenerate_one:
      return "upper-degenerate-one";
  }
  return "unknown";
}

class IntervalFlags {
 public:
  IntervalFlags() = default;

  static IntervalFlags classify(double lower, double upper) {
    IntervalFlags f;
    if (lower < 0.0 || lower > 1.0) f.set(IntervalFlag::lower_out_of_range);
    if (upper < 0.0 || upper > 1.0) f.set(IntervalFlag::upper_out_of_range);
    if (lower == 0.0) f.set(IntervalFlag::lower_degenerate_zero);
    if (upper == 1.0) f.set(IntervalFlag::upper_degenerate_one);
    return f;
  }

  bool has(IntervalFlag f) const noexcept { return (bits_ & static_cast<unsigned>(f)) != 0; }
  void set(IntervalFlag f) noexcept { bits_ |= static_cast<unsigned>(f); }
  bool empty() const noexcept { return bits_ == 0; }
  unsigned bits() const noexcept { return bits_; }

  /// Semicolon-joined flag names in declaration order; empty when no flag is set.
  std::string to_string() const {
    std::string out;
    for (auto f : all_flags) {
      if (!has(f)) continue;
      if (!out.empty()) out += ';';
      out += flag_name(f);
    }
    return out;
  }

  friend bool operator==(const IntervalFlags&, const IntervalFlags&) = default;

 private:
  unsigned bits_ = 0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  Method method = Method::exact_numeric;
  Alpha alpha{0.05};
  Tail tail = Tail::two_sided;
  IntervalFlags flags{};

  bool contains(double p) const noexcept { return lower <= p && p <= upper; }
  double width() const noexcept { return upper - lower; }
};

inline Interval make_interval(double lower, double upper, Method method, Alpha alpha, Tail tail = Tail::two_sided) {
  return {lower, upper, method, alpha, tail, IntervalFlags::classify(lower, upper)};
}

/// Bounds clamped into [0, 1], flags recomputed. Opt-in; table output keeps
/// raw normal-approximation bounds.
inline Interval clamped(const Interval& in) {
  return make_interval(std::clamp(in.lower, 0.0, 1.0), std::clamp(in.upper, 0.0, 1.0), in.method, in.alpha, in.tail);
}

// ---------------------------------------------------------------------------
// Exact numeric interval

/// Equal-tailed interval from an existing grid: alpha/2 of the total mass
/// in each tail. Both bounds are grid nodes strictly inside (0, 1).
template <class Real>
Interval exact_interval(const PrefixMassGrid<Real>& grid, Alpha alpha) {
  const double half = 0.5 * alpha.value();
  const auto idx = locate_crossings(grid, TailQuery{half, half});
  return make_interval(grid.node(idx.lower), grid.node(idx.upper), Method::exact_numeric, alpha);
}

/// Equal-tailed interval of the normalized likelihood, by Simpson quadrature
/// at options.k sub-intervals.
inline Interval exact_interval(const Observation& obs, Alpha alpha, const QuadratureOptions& options = {}) {
  validate_subdivisions(options.k);
  return with_backend(options.precision, [&]<class Real>() {
    return exact_interval(build_grid<Real>(obs, options.k, options.rule), alpha);
  });
}

/// One-sided interval holding 1 - alpha of the mass. Tail::upper_bound gives
/// [0, c]; Tail::lower_bound gives [c, 1].
template <class Real>
Interval one_sided_interval(const PrefixMassGrid<Real>& grid, Alpha alpha, Tail side) {
  if (side == Tail::two_sided) return exact_interval(grid, alpha);
  const double k = static_cast<double>(grid.subdivisions());
  if (side == Tail::upper_bound) {
    const auto idx = locate_crossings(grid, TailQuery{0.0, alpha.value()});
    return make_interval(0.0, static_cast<double>(idx.upper) / k, Method::exact_numeric, alpha, side);
  }
  const auto idx = locate_crossings(grid, TailQuery{alpha.value(), 0.0});
  return make_interval(static_cast<double>(idx.lower) / k, 1.0, Method::exact_numeric, alpha, side);
}

inline Interval one_sided_interval(const Observation& obs, Alpha alpha, Tail side,
                                   const QuadratureOptions& options = {}) {
  validate_subdivisions(options.k);
  return with_backend(options.precision, [&]<class Real>() {
    return one_sided_interval(build_grid<Real>(obs, options.k, options.rule), alpha, side);
  });
}

// ---------------------------------------------------------------------------
// Normal approximation

/// How the normal critical value z_{alpha/2} is obtained. two_decimal rounds
/// the quantile to two decimals (1.96, 2.58), the values printed in
/// textbook z tables.
enum class ZScore { exact, two_decimal };

inline std::string_view zscore_name(ZScore z) { return z == ZScore::exact ? "exact" : "two-decimal"; }

inline ZScore parse_zscore(std::string_view name) {
  if (name == "exact") return ZScore::exact;
  if (name == "two-decimal" || name == "table") return ZScore::two_decimal;
  throw domain_error("unknown z-score mode '" + std::string(name) + "'");
}

inline double critical_value(Alpha alpha, ZScore mode = ZScore::exact) {
  const double z = specfun::normal_quantile(1.0 - 0.5 * alpha.value());
  return mode == ZScore::exact ? z : std::round(z * 100.0) / 100.0;
}

/// p̂ ± z sqrt(p̂(1-p̂)/n), unclamped. x = 0 gives (0, 0), x = n gives (1, 1).
inline Interval normal_interval(const Observation& obs, Alpha alpha, ZScore mode = ZScore::exact) {
  const double p = mle_estimate(obs);
  const double n = static_cast<double>(obs.trials());
  const double half_width = critical_value(alpha, mode) * std::sqrt(p * (1.0 - p) / n);
  return make_interval(p - half_width, p + half_width, Method::normal, alpha);
}

// ---------------------------------------------------------------------------
// Clopper-Pearson

/// Clopper-Pearson bounds as beta quantiles: lower = B^{-1}(alpha/2; x, n-x+1),
/// upper = B^{-1}(1-alpha/2; x+1, n-x). x = 0 pins lower to 0; x = n pins
/// upper to 1.
inline Interval clopper_pearson(const Observation& obs, Alpha alpha) {
  const double x = static_cast<double>(obs.successes());
  const double f = static_cast<double>(obs.failures());
  const double half = 0.5 * alpha.value();
  const double lower = obs.successes() == 0 ? 0.0 : specfun::reg_inc_beta_inv(x, f + 1.0, half);
  const double upper = obs.failures() == 0 ? 1.0 : specfun::reg_inc_beta_inv(x + 1.0, f, 1.0 - half);
  return make_interval(lower, upper, Method::clopper_pearson, alpha);
}

/// The same interval through upper F-distribution points, with
/// v1 = 2(n-x+1), v2 = 2x, v3 = 2(x+1), v4 = 2(n-x):
///   lower = v2 / (v2 + v1 F(v1, v2)),  upper = v3 F(v3, v4) / (v4 + v3 F(v3, v4)).
inline Interval clopper_pearson_f_form(const Observation& obs, Alpha alpha) {
  const double x = static_cast<double>(obs.successes());
  const double n = static_cast<double>(obs.trials());
  const double level = 1.0 - 0.5 * alpha.value();
  double lower = 0.0;
  double upper = 1.0;
  if (obs.successes() > 0) {
    const double v1 = 2.0 * (n - x + 1.0);
    const double v2 = 2.0 * x;
    lower = v2 / (v2 + v1 * specfun::f_quantile(level, v1, v2));
  }
  if (obs.failures() > 0) {
    const double v3 = 2.0 * (x + 1.0);
    const double v4 = 2.0 * (n - x);
    const double f = specfun::f_quantile(level, v3, v4);
    upper = v3 * f / (v4 + v3 * f);
  }
  return make_interval(lower, upper, Method::clopper_pearson, alpha);
}

// ---------------------------------------------------------------------------
// Dispatch

/// Interval by method. mode only affects the normal approximation; options
/// only the exact numeric interval.
inline Interval compute_interval(const Observation& obs, Alpha alpha, Method method,
                                 const QuadratureOptions& options = {}, ZScore mode = ZScore::exact) {
  switch (method) {
    case Method::exact_numeric:
      return exact_interval(obs, alpha, options);
    case Method::normal:
      return normal_interval(obs, alpha, mode);
    case Method::clopper_pearson:
      return clopper_pearson(obs, alpha);
  }
  throw domain_error("unknown method");
}

// ---------------------------------------------------------------------------
// Normal-approximation applicability

struct ApplicabilityOptions {
  int threshold = 5;               // 5 or 10
  std::int64_t large_n = 30;       // "n quite large"
  double small_p = 0.01;           // "unless p is very small"
};

struct Condition {
  int number = 0;
  std::string description;
  bool holds = false;
  bool heuristic = false;  // true when the unknown p was replaced by p̂
};

struct ConditionReport {
  Observation obs;
  ApplicabilityOptions options;
  std::array<Condition, 6> conditions;
  bool all_hold = false;
};

/// Rule-of-thumb conditions for approximating the binomial by a normal.
/// Conditions on the unknown p are evaluated at p̂ = x/n and marked heuristic.
inline ConditionReport applicability(const Observation& obs, const ApplicabilityOptions& options = {}) {
  if (options.threshold != 5 && options.threshold != 10) throw domain_error("threshold must be 5 or 10");
  const double n = static_cast<double>(obs.trials());
  const double p = mle_estimate(obs);
  const double t = options.threshold;
  const std::string ts = std::to_string(options.threshold);
  const double sigma = std::sqrt(p * (1.0 - p) / n);

  ConditionReport r{obs, options, {}, false};
  r.conditions[0] = {1, "np, n(1-p) >= " + ts, n * p >= t && n * (1.0 - p) >= t, true};
  r.conditions[1] = {2, "np(1-p) >= " + ts, n * p * (1.0 - p) >= t, true};
  r.conditions[2] = {3, "n p̂, n(1-p̂) >= " + ts, n * p >= t && n * (1.0 - p) >= t, false};
  r.conditions[3] = {4, "p̂ ± 3 sqrt(p̂(1-p̂)/n) excludes 0 and 1", p - 3.0 * sigma > 0.0 && p + 3.0 * sigma < 1.0,
                     false};
  r.conditions[4] = {5, "n >= " + std::to_string(options.large_n), obs.trials() >= options.large_n, false};
  r.conditions[5] = {6, "n >= 50 unless p < " + fmt::shortest(options.small_p),
                     obs.trials() >= 50 || p < options.small_p, true};
  r.all_hold = true;
  for (const auto& c : r.conditions) r.all_hold = r.all_hold && c.holds;
  return r;
}

}  // namespace laplace_ci
