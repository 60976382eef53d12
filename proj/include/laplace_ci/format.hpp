#pragma once

// Fixed-point number formatting with the table conventions: bounds are
// truncated toward zero. Error percentages are truncated too but keep the
// sign of small negative values ("-0.000").

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "laplace_ci/errors.hpp"

namespace laplace_ci::fmt {

namespace detail {

inline std::string to_chars_fixed(double v, int decimals) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw domain_error("cannot format value");
  return std::string(buf, ptr);
}

inline bool is_negative_zero_text(const std::string& s) {
  if (s.empty() || s[0] != '-') return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '.') return false;
  }
  return true;
}

}  // namespace detail

/// v with `decimals` places, truncated toward zero. The value is first
/// rounded at 12 places so that parsing the output and truncating again is
/// idempotent.
inline std::string truncated(double v, int decimals) {
  if (!std::isfinite(v)) throw domain_error("cannot format non-finite value");
  std::string s = detail::to_chars_fixed(v, decimals >= 12 ? decimals : 12);
  if (decimals < 12) {
    const auto dot = s.find('.');
    s.resize(decimals == 0 ? dot : dot + 1 + static_cast<std::size_t>(decimals));
  }
  if (detail::is_negative_zero_text(s)) s.erase(0, 1);
  return s;
}

/// As truncated(), but a negative v that truncates to zero keeps its sign.
inline std::string signed_truncated(double v, int decimals) {
  std::string s = truncated(v, decimals);
  if (v < 0.0 && s[0] != '-') s.insert(0, 1, '-');
  return s;
}

/// v with `decimals` places, rounded to nearest.
inline std::string rounded(double v, int decimals) {
  if (!std::isfinite(v)) throw domain_error("cannot format non-finite value");
  return detail::to_chars_fixed(v, decimals);
}

/// Shortest text that parses back to v ("0.05", "0.01").
inline std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw domain_error("cannot format value");
  return std::string(buf, ptr);
}

}  // namespace laplace_ci::fmt
