#pragma once

// Comparisons of the approximate intervals against the numeric interval,
// taken as the reference value, and the k-doubling accuracy audit of the
// numeric interval itself.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laplace_ci/errors.hpp"
#include "laplace_ci/format.hpp"
#include "laplace_ci/intervals.hpp"
#include "laplace_ci/likelihood.hpp"
#include "laplace_ci/parallel.hpp"
#include "laplace_ci/quadrature.hpp"

namespace laplace_ci {

enum class BoundSide { lower, upper };

inline std::string_view side_name(BoundSide s) { return s == BoundSide::lower ? "lower" : "upper"; }

/// The cases of the published comparison: n = 5 with x = 0..5, and n = 1000
/// with x = 0, 500, 1000.
inline std::vector<Observation> published_cases() {
  std::vector<Observation> out;
  for (std::int64_t x = 0; x <= 5; ++x) out.emplace_back(5, x);
  for (std::int64_t x : {0, 500, 1000}) out.emplace_back(1000, x);
  return out;
}

/// (approx - exact) / exact * 100.
inline double error_percentage(double exact, double approx) {
  if (exact == 0.0) throw domain_error("error_percentage: the reference value must be non-zero");
  return (approx - exact) / exact * 100.0;
}

struct ComparisonRow {
  Observation obs;
  Alpha alpha;
  BoundSide side;
  double exact;
  double approx;
  Method method;
  double error_percent;  // meaningful only when !excluded
  bool excluded;
  std::string exclusion_reason;
};

namespace detail {

inline double bound_of(const Interval& iv, BoundSide side) { return side == BoundSide::lower ? iv.lower : iv.upper; }

// Returns the reason the approximate bound is unusable as a comparison
// point, or an empty string.
inline std::string exclusion_reason(const Interval& approx, BoundSide side) {
  const double v = bound_of(approx, side);
  const bool degenerate = side == BoundSide::lower ? approx.flags.has(IntervalFlag::lower_degenerate_zero)
                                                   : approx.flags.has(IntervalFlag::upper_degenerate_one);
  if (degenerate) return "degenerate";
  if (v <= 0.0) return "at or below 0";
  if (v >= 1.0) return "at or above 1";
  return {};
}

inline unsigned workers_for(const QuadratureOptions& options) {
  // MPFR precision is process-global state.
  return options.precision.backend == Backend::mpfr ? 1u : 0u;
}

}  // namespace detail

/// Exact and approximate intervals for one case.
struct CasePair {
  Interval exact;
  Interval approx;
};

/// One row per (case, side), ordered side-major (all lower rows, then all
/// upper rows) in input case order. Excluded rows are kept and flagged.
inline std::vector<ComparisonRow> comparison_table(std::span<const Observation> cases, Alpha alpha, Method method,
                                                   const QuadratureOptions& options = {},
                                                   ZScore zscore = ZScore::two_decimal) {
  if (method == Method::exact_numeric) throw domain_error("comparison_table: method must be an approximation");
  validate_subdivisions(options.k);
  const auto pairs = parallel_map(
      cases.size(),
      [&](std::size_t i) {
        return CasePair{exact_interval(cases[i], alpha, options), compute_interval(cases[i], alpha, method, options, zscore)};
      },
      detail::workers_for(options));

  std::vector<ComparisonRow> rows;
  rows.reserve(2 * cases.size());
  for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const double exact = detail::bound_of(pairs[i].exact, side);
      const double approx = detail::bound_of(pairs[i].approx, side);
      std::string reason = detail::exclusion_reason(pairs[i].approx, side);
      const bool excluded = !reason.empty();
      rows.push_back({cases[i], alpha, side, exact, approx, method, excluded ? 0.0 : error_percentage(exact, approx),
                      excluded, std::move(reason)});
    }
  }
  return rows;
}

struct AccuracyRow {
  Observation obs;
  Alpha alpha;
  BoundSide side;
  double value_k;
  double value_2k;
  std::optional<int> first_differing_decimal;
};

/// Position (1-based, after the decimal point) of the first digit where the
/// `places`-decimal truncations of a and b differ; 0 if the integer parts
/// differ; nullopt if they agree.
inline std::optional<int> first_differing_decimal(double a, double b, int places = 8) {
  const std::string sa = fmt::truncated(a, places);
  const std::string sb = fmt::truncated(b, places);
  if (sa == sb) return std::nullopt;
  const auto da = sa.find('.');
  const auto db = sb.find('.');
  if (sa.substr(0, da) != sb.substr(0, db)) return 0;
  for (int i = 1; i <= places; ++i) {
    if (sa[da + i] != sb[db + i]) return i;
  }
  return std::nullopt;
}

/// Numeric interval at k and 2k for every case; rows ordered case-major,
/// lower then upper.
inline std::vector<AccuracyRow> accuracy_study(std::span<const Observation> cases, Alpha alpha,
                                               const QuadratureOptions& options = {}) {
  validate_subdivisions(options.k);
  validate_subdivisions(2 * options.k);
  QuadratureOptions doubled = options;
  doubled.k = 2 * options.k;
  const auto pairs = parallel_map(
      cases.size(),
      [&](std::size_t i) { return CasePair{exact_interval(cases[i], alpha, options), exact_interval(cases[i], alpha, doubled)}; },
      detail::workers_for(options));

  std::vector<AccuracyRow> rows;
  rows.reserve(2 * cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
      const double a = detail::bound_of(pairs[i].exact, side);
      const double b = detail::bound_of(pairs[i].approx, side);
      rows.push_back({cases[i], alpha, side, a, b, first_differing_decimal(a, b)});
    }
  }
  return rows;
}

/// All three intervals for one case.
struct LimitRow {
  Observation obs;
  Interval exact;
  Interval normal;
  Interval clopper_pearson;
};

inline std::vector<LimitRow> limit_table(std::span<const Observation> cases, Alpha alpha,
                                         const QuadratureOptions& options = {},
                                         ZScore zscore = ZScore::two_decimal) {
  validate_subdivisions(options.k);
  return parallel_map(
      cases.size(),
      [&](std::size_t i) {
        return LimitRow{cases[i], exact_interval(cases[i], alpha, options), normal_interval(cases[i], alpha, zscore),
                        clopper_pearson(cases[i], alpha)};
      },
      detail::workers_for(options));
}

}  // namespace laplace_ci
