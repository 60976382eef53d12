#pragma once

// Arithmetic backends for the quadrature hot path. The default is native
// double; long double and (when built with MPFR) an arbitrary-mantissa
// software float can be selected for the grid-refinement audit.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "laplace_ci/errors.hpp"

#ifdef LAPLACE_CI_HAVE_MPFR
#include <boost/multiprecision/mpfr.hpp>
#endif

namespace laplace_ci {

inline constexpr const char* precision_env_var = "LAPLACE_CI_PRECISION";

enum class Backend { native, long_double, mpfr };

struct Precision {
  Backend backend = Backend::native;
  unsigned mantissa_bits = 53;

  std::string label() const {
    switch (backend) {
      case Backend::native:
        return "native";
      case Backend::long_double:
        return "long-double";
      case Backend::mpfr:
        return "mpfr:" + std::to_string(mantissa_bits);
    }
    return "native";
  }

  friend bool operator==(const Precision&, const Precision&) = default;
};

inline constexpr bool mpfr_available() {
#ifdef LAPLACE_CI_HAVE_MPFR
  return true;
#else
  return false;
#endif
}

/// Parses "native", "long-double" or "mpfr:<bits>".
inline Precision parse_precision(std::string_view text) {
  if (text.empty() || text == "native") return {};
  if (text == "long-double") return {Backend::long_double, static_cast<unsigned>(std::numeric_limits<long double>::digits)};
  constexpr std::string_view mpfr_prefix = "mpfr:";
  if (text.starts_with(mpfr_prefix)) {
    const auto digits = text.substr(mpfr_prefix.size());
    unsigned bits = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bits);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || bits < 53 || bits > 4096) {
      throw domain_error("precision: mantissa bits must be an integer in [53, 4096]");
    }
    if (!mpfr_available()) throw domain_error("precision: this build has no MPFR backend");
    return {Backend::mpfr, bits};
  }
  throw domain_error("precision: expected native, long-double or mpfr:<bits>, got '" + std::string(text) + "'");
}

/// Backend selected by the LAPLACE_CI_PRECISION environment variable.
inline Precision precision_from_environment() {
  const char* value = std::getenv(precision_env_var);
  return value == nullptr ? Precision{} : parse_precision(value);
}

#ifdef LAPLACE_CI_HAVE_MPFR
using mpfr_real = boost::multiprecision::mpfr_float;
#endif

/// Invokes fn.template operator()<Real>() with the Real type selected by
/// the precision. The MPFR default precision is process-global, so MPFR
/// work must not run concurrently with differing mantissa widths.
template <class Fn>
decltype(auto) with_backend(const Precision& precision, Fn&& fn) {
  switch (precision.backend) {
    case Backend::long_double:
      return std::forward<Fn>(fn).template operator()<long double>();
    case Backend::mpfr:
#ifdef LAPLACE_CI_HAVE_MPFR
    {
      const auto digits10 = static_cast<unsigned>(std::ceil(precision.mantissa_bits * 0.30102999566398120)) + 1;
      mpfr_real::default_precision(digits10);
      return std::forward<Fn>(fn).template operator()<mpfr_real>();
    }
#else
      throw domain_error("precision: this build has no MPFR backend");
#endif
    case Backend::native:
      break;
  }
  return std::forward<Fn>(fn).template operator()<double>();
}

}  // namespace laplace_ci
