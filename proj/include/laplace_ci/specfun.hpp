#pragma once

// Special functions backing the closed-form interval methods: log-gamma,
// log binomial coefficients, the standard normal quantile, the regularized
// incomplete beta function with its inverse, and F-distribution quantiles.
//
// Every function here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "laplace_ci/errors.hpp"

namespace laplace_ci::specfun {

namespace detail {

inline constexpr double half_ln_two_pi = 0.91893853320467274178032973640562;

// lnΓ(z) - [(z - 1/2) ln z - z + ln√(2π)], the Stirling remainder, for z >= 15.
inline double stirling_series(double z) {
  // Bernoulli terms B_2k / (2k (2k-1) z^(2k-1)), k = 1..8.
  static constexpr double coeff[] = {
      1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,  -1.0 / 1680.0,
      1.0 / 1188.0,        -691.0 / 360360.0,    1.0 / 156.0,   -3617.0 / 122400.0};
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double sum = 0.0;
  for (int i = 7; i >= 0; --i) sum = sum * inv2 + coeff[i];
  return sum * inv;
}

inline constexpr double stirling_threshold = 15.0;

inline double ln_gamma_unchecked(double z) {
  double shifted = z;
  double product = 1.0;
  while (shifted < stirling_threshold) {
    product *= shifted;
    shifted += 1.0;
  }
  const double base = (shifted - 0.5) * std::log(shifted) - shifted + half_ln_two_pi;
  return base + stirling_series(shifted) - std::log(product);
}

// lnΓ(z) minus its Stirling base; stays O(1/z) so it can be combined without
// cancelling large logarithms.
inline double stirling_remainder(double z) {
  if (z >= stirling_threshold) return stirling_series(z);
  return ln_gamma_unchecked(z) - ((z - 0.5) * std::log(z) - z + half_ln_two_pi);
}

// ln[x^a (1-x)^b / B(a, b)], arranged so that large shapes do not cancel.
inline double ln_beta_front(double a, double b, double x) {
  const double s = a + b;
  const double y = 1.0 - x;
  // d = x*s - a = (1-x)*(-a) + x*b
  const double d = x * b - y * a;
  const double ta = (std::fabs(d) < 0.5 * a) ? a * std::log1p(d / a) : a * std::log(x * s / a);
  const double tb = (std::fabs(d) < 0.5 * b) ? b * std::log1p(-d / b) : b * std::log(y * s / b);
  return ta + tb + 0.5 * std::log(a * b / s) - half_ln_two_pi - stirling_remainder(a) -
         stirling_remainder(b) + stirling_remainder(s);
}

// Continued fraction for I_x(a, b), modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int max_iterations = 20000;
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

inline void require_shapes(double a, double b, const char* fn) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw domain_error(std::string(fn) + ": shape parameters must be positive and finite");
  }
}

inline void require_level(double q, const char* fn) {
  if (!(q > 0.0 && q < 1.0)) {
    throw domain_error(std::string(fn) + ": probability level must lie in (0, 1)");
  }
}

// Initial guess for the incomplete beta inverse.
inline double inverse_beta_guess(double a, double b, double q) {
  if (a >= 1.0 && b >= 1.0) {
    const double pp = (q < 0.5) ? q : 1.0 - q;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (q < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double hm = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + hm) / hm -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * hm));
    return a / (a + b * std::exp(2.0 * w));
  }
  const double lna = std::log(a / (a + b));
  const double lnb = std::log(b / (a + b));
  const double t = std::exp(a * lna) / a;
  const double u = std::exp(b * lnb) / b;
  const double w = t + u;
  if (q < t / w) return std::pow(a * w * q, 1.0 / a);
  return 1.0 - std::pow(b * w * (1.0 - q), 1.0 / b);
}

}  // namespace detail

/// Natural logarithm of the gamma function for z > 0.
inline double ln_gamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw domain_error("ln_gamma: argument must be positive and finite");
  return detail::ln_gamma_unchecked(z);
}

/// ln C(n, x). Symmetric in x <-> n - x bit for bit.
inline double ln_choose(std::int64_t n, std::int64_t x) {
  if (n < 0 || x < 0 || x > n) throw domain_error("ln_choose: requires 0 <= x <= n");
  if (x == 0 || x == n) return 0.0;
  const double nd = static_cast<double>(n);
  const double xd = static_cast<double>(x);
  return ln_gamma(nd + 1.0) - (ln_gamma(xd + 1.0) + ln_gamma(nd - xd + 1.0));
}

/// ln B(a, b).
inline double ln_beta(double a, double b) {
  detail::require_shapes(a, b, "ln_beta");
  return (ln_gamma(a) + ln_gamma(b)) - ln_gamma(a + b);
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

/// Quantile of the standard normal distribution: z with Φ(z) = q.
///
/// Rational approximation (relative error ~1e-9) followed by one Halley
/// step against the erfc-based CDF. The upper half is evaluated as the
/// negated lower-tail quantile of 1 - q, which is exact in floating point.
inline double normal_quantile(double q) {
  detail::require_level(q, "normal_quantile");
  if (q > 0.5) {
    const double upper = 1.0 - q;
    return upper == 0.5 ? 0.0 : -normal_quantile(upper);
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;

  double z;
  if (q < low) {
    const double t = std::sqrt(-2.0 * std::log(q));
    z = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else {
    const double u = q - 0.5;
    if (u == 0.0) return 0.0;
    const double r = u * u;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley refinement.
  const double e = normal_cdf(z) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  return z - u / (1.0 + 0.5 * z * u);
}

/// Regularized incomplete beta function I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  detail::require_shapes(a, b, "reg_inc_beta");
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("reg_inc_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  // The continued fraction converges fastest below (a + 1) / (a + b + 2);
  // above it, evaluate the reflected function.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(detail::ln_beta_front(a, b, x)) * detail::beta_continued_fraction(a, b, x) / a;
  }
  const double y = 1.0 - x;
  return 1.0 - std::exp(detail::ln_beta_front(b, a, y)) * detail::beta_continued_fraction(b, a, y) / b;
}

/// Beta(a, b) density.
inline double beta_density(double a, double b, double x) {
  detail::require_shapes(a, b, "beta_density");
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  return std::exp(detail::ln_beta_front(a, b, x)) / (x * (1.0 - x));
}

/// Inverse of the regularized incomplete beta function: x with I_x(a, b) = q.
///
/// Halley iteration kept inside a shrinking bisection bracket; any step that
/// leaves the bracket is replaced by the bracket midpoint.
inline double reg_inc_beta_inv(double a, double b, double q) {
  detail::require_shapes(a, b, "reg_inc_beta_inv");
  detail::require_level(q, "reg_inc_beta_inv");

  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(detail::inverse_beta_guess(a, b, q), 1e-300, 1.0 - 1e-16);
  if (!(x > 0.0 && x < 1.0)) x = 0.5;

  for (int iter = 0; iter < 400; ++iter) {
    const double f = reg_inc_beta(a, b, x) - q;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next;
    const double density = beta_density(a, b, x);
    if (density > 0.0 && std::isfinite(density)) {
      const double step = f / density;
      const double curvature = (a - 1.0) / x - (b - 1.0) / (1.0 - x);
      double denom = 1.0 - 0.5 * step * curvature;
      if (!(denom > 0.5 && denom < 2.0)) denom = 1.0;
      next = x - step / denom;
    } else {
      next = lo + 0.5 * (hi - lo);
    }
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    // Stop only once the step is below one ulp; near x = 1 a relative test
    // would leave several representable roots unvisited.
    if (next == x) return next;
    if (std::nextafter(lo, hi) >= hi) return next;
    x = next;
  }
  return x;
}

/// CDF of the F(v1, v2) distribution.
inline double f_cdf(double f, double v1, double v2) {
  detail::require_shapes(v1, v2, "f_cdf");
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  const double t = v1 * f;
  return reg_inc_beta(0.5 * v1, 0.5 * v2, t / (t + v2));
}

/// q-quantile of F(v1, v2), via the incomplete beta inverse.
inline double f_quantile(double q, double v1, double v2) {
  detail::require_level(q, "f_quantile");
  if (!(v1 >= 1.0) || !(v2 >= 1.0)) throw domain_error("f_quantile: degrees of freedom must be >= 1");
  const double x = reg_inc_beta_inv(0.5 * v1, 0.5 * v2, q);
  return v2 * x / (v1 * (1.0 - x));
}

}  // namespace laplace_ci::specfun
