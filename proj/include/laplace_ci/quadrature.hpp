#pragma once

// Simpson integration of the binomial likelihood over [0, 1] on a uniform
// grid of k sub-intervals, exposing the cumulative mass at every grid node
// so interval bounds can be located as tail-mass crossings.
//
// Two prefix constructions are available:
//
//   composite_running  prefix[i] = (h/3) * sum_{j<=i} w_j f(y_j), with the
//                      composite Simpson weights w = 1, 4, 2, 4, ..., 2, 4, 1.
//                      prefix[k] is exactly the composite Simpson total.
//                      Crossings: first node whose prefix reaches the target.
//
//   midpoint_simpson   prefix[i] = sum over the first i sub-intervals of
//                      (h/6) [f(y_j) + 4 f(y_j + h/2) + f(y_j+1)], an O(h^4)
//                      estimate of the integral up to y_i with prefix[0] = 0.
//                      Crossings: ceiling for the lower bound, floor for the
//                      upper bound.
//
// composite_running is the default; it resolves the published k = 2^20 and
// k = 2^21 bounds exactly. The likelihood is evaluated in the log domain and
// scaled by its value at the mode x/n, so prefix values are expressed in
// units of exp(log_scale()).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "laplace_ci/errors.hpp"
#include "laplace_ci/likelihood.hpp"
#include "laplace_ci/precision.hpp"

namespace laplace_ci {

inline constexpr std::int64_t default_subdivisions = std::int64_t{1} << 20;
inline constexpr std::int64_t max_subdivisions = std::int64_t{1} << 26;

enum class PrefixRule { composite_running, midpoint_simpson };

struct QuadratureOptions {
  std::int64_t k = default_subdivisions;
  PrefixRule rule = PrefixRule::composite_running;
  Precision precision{};
};

inline void validate_subdivisions(std::int64_t k) {
  if (k < 2 || k % 2 != 0) throw domain_error("k must be an even integer >= 2");
  if (k > max_subdivisions) {
    throw resource_error("k = " + std::to_string(k) + " exceeds the limit of " + std::to_string(max_subdivisions));
  }
}

/// Grid indices of a lower and an upper tail-mass crossing.
struct CrossingPair {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  friend bool operator==(const CrossingPair&, const CrossingPair&) = default;
};

/// Fractions of the total mass to leave in the left and right tails. A
/// fraction of zero disables that side (its index is reported as 0 / k).
struct TailQuery {
  double lower_fraction = 0.0;
  double upper_fraction = 0.0;
};

namespace detail {

// Neumaier compensated sum.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& value) {
    const Real t = sum_ + value;
    using std::abs;
    if (abs(sum_) >= abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + compensation_; }

 private:
  Real sum_ = Real(0);
  Real compensation_ = Real(0);
};

// ln(i / m) for i = 0..m, shared between grids with the same m.
class NodeLogTable {
 public:
  static constexpr std::int64_t max_cached_nodes = std::int64_t{1} << 22;

  static std::shared_ptr<const std::vector<double>> get(std::int64_t m) {
    static std::mutex mutex;
    static std::map<std::int64_t, std::shared_ptr<const std::vector<double>>> cache;
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(m); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m) + 1);
    const double md = static_cast<double>(m);
    for (std::int64_t i = 0; i <= m; ++i) (*table)[i] = std::log(static_cast<double>(i) / md);
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(m, std::move(table));
    return it->second;
  }
};

// Likelihood divided by C(n, x) * exp(mode) at node i of a grid of m
// intervals on [0, 1]. Node i of (n, x) and node m - i of (n, n - x) give
// identical values.
template <class Real>
class ScaledLikelihood {
 public:
  ScaledLikelihood(const Observation& obs, std::int64_t m)
      : m_(m),
        successes_(obs.successes()),
        failures_(obs.failures()),
        mode_(log_kernel_at_mode(obs)) {
    if constexpr (std::is_same_v<Real, double>) {
      if (m <= NodeLogTable::max_cached_nodes) table_ = NodeLogTable::get(m);
    }
  }

  Real operator()(std::int64_t i) const {
    using std::exp;
    using std::log;
    if constexpr (std::is_same_v<Real, double>) {
      if (table_) {
        const auto& t = *table_;
        const double s = successes_ == 0 ? 0.0 : static_cast<double>(successes_) * t[i];
        const double f = failures_ == 0 ? 0.0 : static_cast<double>(failures_) * t[m_ - i];
        return std::exp((s + f) - mode_);
      }
    }
    const Real md = Real(static_cast<double>(m_));
    const Real s = successes_ == 0 ? Real(0) : Real(static_cast<double>(successes_)) * log(Real(static_cast<double>(i)) / md);
    const Real f = failures_ == 0 ? Real(0) : Real(static_cast<double>(failures_)) * log(Real(static_cast<double>(m_ - i)) / md);
    return exp((s + f) - Real(mode_));
  }

 private:
  std::int64_t m_;
  std::int64_t successes_;
  std::int64_t failures_;
  double mode_;
  std::shared_ptr<const std::vector<double>> table_;
};

// Calls visit(i, prefix_i) for i = 0..k in order and returns prefix_k.
template <class Real, class Visit>
Real walk_prefix(const Observation& obs, std::int64_t k, PrefixRule rule, Visit&& visit) {
  if (rule == PrefixRule::composite_running) {
    const ScaledLikelihood<Real> f(obs, k);
    const Real scale = Real(1) / Real(3.0 * static_cast<double>(k));
    CompensatedSum<Real> sum;
    for (std::int64_t i = 0; i <= k; ++i) {
      const Real v = f(i);
      if (i == 0 || i == k) {
        sum.add(v);
      } else if (i % 2 == 1) {
        sum.add(Real(4) * v);
      } else {
        sum.add(Real(2) * v);
      }
      visit(i, Real(sum.value() * scale));
    }
    return Real(sum.value() * scale);
  }
  // Per-sub-interval Simpson; midpoints live on the grid of 2k intervals.
  const ScaledLikelihood<Real> f(obs, 2 * k);
  const Real scale = Real(1) / Real(6.0 * static_cast<double>(k));
  CompensatedSum<Real> sum;
  Real left = f(0);
  visit(std::int64_t{0}, Real(0));
  for (std::int64_t i = 0; i < k; ++i) {
    const Real mid = f(2 * i + 1);
    const Real right = f(2 * i + 2);
    sum.add(left + Real(4) * mid + right);
    visit(i + 1, Real(sum.value() * scale));
    left = right;
  }
  return Real(sum.value() * scale);
}

inline std::int64_t clamp_interior(std::int64_t index, std::int64_t k) { return std::clamp<std::int64_t>(index, 1, k - 1); }

}  // namespace detail

/// Cumulative likelihood mass at every node of a uniform grid on [0, 1].
/// Immutable after construction.
template <class Real = double>
class PrefixMassGrid {
 public:
  PrefixMassGrid(const Observation& obs, std::int64_t k, PrefixRule rule = PrefixRule::composite_running)
      : obs_(obs), k_(k), rule_(rule) {
    validate_subdivisions(k);
    log_scale_ = specfun::ln_choose(obs.trials(), obs.successes()) + log_kernel_at_mode(obs);
    prefix_.resize(static_cast<std::size_t>(k) + 1);
    detail::walk_prefix<Real>(obs, k, rule, [this](std::int64_t i, const Real& v) { prefix_[i] = v; });
  }

  const Observation& observation() const noexcept { return obs_; }
  std::int64_t subdivisions() const noexcept { return k_; }
  PrefixRule rule() const noexcept { return rule_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(k_); }

  /// prefix()[i] approximates exp(-log_scale()) * ∫₀^{i h} L(p; n, x) dp.
  std::span<const Real> prefix() const noexcept { return prefix_; }
  const Real& total() const noexcept { return prefix_.back(); }
  double log_scale() const noexcept { return log_scale_; }

  /// The unscaled total ∫₀¹ L(p; n, x) dp; should equal 1 / (n + 1).
  double total_mass() const {
    using std::exp;
    return static_cast<double>(total() * Real(exp(log_scale_)));
  }

  /// Grid coordinate i / k.
  double node(std::int64_t i) const { return static_cast<double>(i) / static_cast<double>(k_); }

 private:
  Observation obs_;
  std::int64_t k_;
  PrefixRule rule_;
  double log_scale_ = 0.0;
  std::vector<Real> prefix_;
};

/// Builds the prefix-mass grid of the likelihood of obs at k sub-intervals.
template <class Real = double>
PrefixMassGrid<Real> build_grid(const Observation& obs, std::int64_t k,
                                PrefixRule rule = PrefixRule::composite_running) {
  return PrefixMassGrid<Real>(obs, k, rule);
}

namespace detail {

template <class Real>
void require_target(const PrefixMassGrid<Real>& grid, const Real& target, const char* fn) {
  if (!(target > Real(0) && target < grid.total())) {
    throw domain_error(std::string(fn) + ": target must lie strictly between 0 and the total mass");
  }
}

}  // namespace detail

/// Index of the lower bound leaving `target` (scaled mass) in the left tail:
/// the smallest i with prefix[i] >= target, never below 1.
template <class Real>
std::int64_t lower_crossing(const PrefixMassGrid<Real>& grid, const Real& target) {
  detail::require_target(grid, target, "lower_crossing");
  const auto prefix = grid.prefix();
  const auto it = std::lower_bound(prefix.begin(), prefix.end(), target);
  return detail::clamp_interior(static_cast<std::int64_t>(it - prefix.begin()), grid.subdivisions());
}

/// Index of the upper bound leaving `target` (scaled mass) in the right
/// tail, never above k - 1.
///
/// composite_running: smallest i with prefix[i] >= total - target.
/// midpoint_simpson: largest i with total - prefix[i] >= target.
template <class Real>
std::int64_t upper_crossing(const PrefixMassGrid<Real>& grid, const Real& target) {
  detail::require_target(grid, target, "upper_crossing");
  const auto prefix = grid.prefix();
  const Real threshold = grid.total() - target;
  std::int64_t index;
  if (grid.rule() == PrefixRule::composite_running) {
    index = std::lower_bound(prefix.begin(), prefix.end(), threshold) - prefix.begin();
  } else {
    index = (std::upper_bound(prefix.begin(), prefix.end(), threshold) - prefix.begin()) - 1;
  }
  return detail::clamp_interior(index, grid.subdivisions());
}

/// Both crossings for a pair of tail fractions on an existing grid.
template <class Real>
CrossingPair locate_crossings(const PrefixMassGrid<Real>& grid, const TailQuery& query) {
  CrossingPair out{0, grid.subdivisions()};
  if (query.lower_fraction > 0.0) out.lower = lower_crossing(grid, Real(Real(query.lower_fraction) * grid.total()));
  if (query.upper_fraction > 0.0) out.upper = upper_crossing(grid, Real(Real(query.upper_fraction) * grid.total()));
  return out;
}

/// Same crossings as locate_crossings on build_grid(obs, k, rule), computed in
/// two passes without storing the prefix array. Answers several queries
/// from one pair of passes.
template <class Real = double>
std::vector<CrossingPair> locate_crossings_streaming(const Observation& obs, std::int64_t k, PrefixRule rule,
                                                     std::span<const TailQuery> queries) {
  validate_subdivisions(k);
  const Real total = detail::walk_prefix<Real>(obs, k, rule, [](std::int64_t, const Real&) {});

  struct Search {
    Real lower_target;
    Real upper_threshold;
    bool want_lower;
    bool want_upper;
    std::int64_t lower = -1;
    std::int64_t upper = -1;
  };
  std::vector<Search> searches;
  searches.reserve(queries.size());
  for (const auto& q : queries) {
    for (double fraction : {q.lower_fraction, q.upper_fraction}) {
      if (fraction < 0.0 || (fraction > 0.0 && !(Real(fraction) * total < total))) {
        throw domain_error("locate_crossings_streaming: tail fractions must lie in [0, 1)");
      }
    }
    const Real lower_target = Real(q.lower_fraction) * total;
    const Real upper_target = Real(q.upper_fraction) * total;
    searches.push_back({lower_target, Real(total - upper_target), q.lower_fraction > 0.0, q.upper_fraction > 0.0});
  }

  detail::walk_prefix<Real>(obs, k, rule, [&](std::int64_t i, const Real& v) {
    for (auto& s : searches) {
      if (s.want_lower && s.lower < 0 && v >= s.lower_target) s.lower = i;
      if (s.want_upper && s.upper < 0) {
        if (rule == PrefixRule::composite_running) {
          if (v >= s.upper_threshold) s.upper = i;
        } else if (v > s.upper_threshold) {
          s.upper = i - 1;
        }
      }
    }
  });

  std::vector<CrossingPair> out;
  out.reserve(searches.size());
  for (const auto& s : searches) {
    CrossingPair pair{0, k};
    if (s.want_lower) pair.lower = detail::clamp_interior(s.lower < 0 ? k : s.lower, k);
    if (s.want_upper) pair.upper = detail::clamp_interior(s.upper < 0 ? k : s.upper, k);
    out.push_back(pair);
  }
  return out;
}

}  // namespace laplace_ci
