#pragma once

// Rendering of interval results and of the published comparison tables
// (I-VIII) as aligned text, markdown, CSV or JSON.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "laplace_ci/analysis.hpp"
#include "laplace_ci/errors.hpp"
#include "laplace_ci/format.hpp"
#include "laplace_ci/intervals.hpp"

namespace laplace_ci {

inline constexpr std::string_view version = "1.0.0";

enum class Format { human, csv, json, markdown };

inline Format parse_format(std::string_view s) {
  if (s == "human") return Format::human;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "markdown" || s == "md") return Format::markdown;
  throw domain_error("unknown format '" + std::string(s) + "'");
}

inline std::string_view format_name(Format f) {
  switch (f) {
    case Format::human:
      return "human";
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
    case Format::markdown:
      return "markdown";
  }
  return "human";
}

/// 100 * fraction without binary noise ("95", "99.9").
inline std::string percent_text(double fraction) { return fmt::shortest(std::round(fraction * 1e11) / 1e9); }

inline std::string_view rule_name(PrefixRule r) {
  return r == PrefixRule::composite_running ? "composite-running" : "midpoint-simpson";
}

inline PrefixRule parse_rule(std::string_view s) {
  if (s == "composite-running") return PrefixRule::composite_running;
  if (s == "midpoint-simpson") return PrefixRule::midpoint_simpson;
  throw domain_error("unknown prefix rule '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Plain tables

struct TextTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string render_text(const TextTable& t, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::csv: {
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << detail::csv_field(cells[i]);
        os << '\n';
      };
      line(t.header);
      for (const auto& r : t.rows) line(r);
      break;
    }
    case Format::markdown: {
      if (!t.title.empty()) os << "### " << t.title << "\n\n";
      auto line = [&](const std::vector<std::string>& cells) {
        os << '|';
        for (const auto& c : cells) os << ' ' << c << " |";
        os << '\n';
      };
      line(t.header);
      os << '|';
      for (std::size_t i = 0; i < t.header.size(); ++i) os << "---|";
      os << '\n';
      for (const auto& r : t.rows) line(r);
      break;
    }
    case Format::human:
    case Format::json: {
      std::vector<std::size_t> width(t.header.size(), 0);
      auto measure = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
      };
      measure(t.header);
      for (const auto& r : t.rows) measure(r);
      if (!t.title.empty()) os << t.title << '\n';
      auto line = [&](const std::vector<std::string>& cells) {
        std::string text;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (i) text += "  ";
          text += std::string(width[i] - cells[i].size(), ' ') + cells[i];
        }
        while (!text.empty() && text.back() == ' ') text.pop_back();
        os << text << '\n';
      };
      line(t.header);
      for (const auto& r : t.rows) line(r);
      break;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Single interval

inline std::string_view tail_name(Tail t) {
  switch (t) {
    case Tail::two_sided:
      return "two-sided";
    case Tail::upper_bound:
      return "upper-bound";
    case Tail::lower_bound:
      return "lower-bound";
  }
  return "two-sided";
}

inline Tail parse_tail(std::string_view s) {
  if (s == "two-sided") return Tail::two_sided;
  if (s == "upper-bound") return Tail::upper_bound;
  if (s == "lower-bound") return Tail::lower_bound;
  throw domain_error("unknown tail '" + std::string(s) + "'");
}

inline nlohmann::ordered_json to_json(const ConditionReport& r) {
  nlohmann::ordered_json j;
  j["threshold"] = r.options.threshold;
  j["all_hold"] = r.all_hold;
  for (const auto& c : r.conditions) {
    j["conditions"].push_back({{"number", c.number}, {"condition", c.description}, {"holds", c.holds}, {"heuristic", c.heuristic}});
  }
  return j;
}

/// Renders one interval with 8 truncated decimals. The k field is printed
/// for the numeric method only; the condition report, when given, is
/// appended.
inline std::string render_interval(const Observation& obs, const Interval& iv, std::int64_t k, Format format,
                                   const ConditionReport* conditions = nullptr) {
  const std::string lower = fmt::truncated(iv.lower, 8);
  const std::string upper = fmt::truncated(iv.upper, 8);
  const std::string flags = iv.flags.to_string();
  const std::string k_text = iv.method == Method::exact_numeric ? std::to_string(k) : "";
  std::ostringstream os;
  switch (format) {
    case Format::json: {
      nlohmann::ordered_json j;
      j["n"] = obs.trials();
      j["x"] = obs.successes();
      j["alpha"] = iv.alpha.value();
      j["method"] = method_name(iv.method);
      j["tail"] = tail_name(iv.tail);
      j["lower"] = std::stod(lower);
      j["upper"] = std::stod(upper);
      if (iv.method == Method::exact_numeric) j["k"] = k;
      j["flags"] = nlohmann::ordered_json::array();
      for (auto f : all_flags) {
        if (iv.flags.has(f)) j["flags"].push_back(flag_name(f));
      }
      if (conditions) j["applicability"] = to_json(*conditions);
      os << j.dump(2) << '\n';
      return os.str();
    }
    case Format::csv:
    case Format::markdown: {
      TextTable t{"", {"n", "x", "alpha", "method", "lower", "upper", "k", "flags"}, {}};
      t.rows.push_back({std::to_string(obs.trials()), std::to_string(obs.successes()), fmt::shortest(iv.alpha.value()),
                        std::string(method_name(iv.method)), lower, upper, k_text, flags});
      os << render_text(t, format);
      break;
    }
    case Format::human:
      os << "n " << obs.trials() << ", x " << obs.successes() << ", " << percent_text(iv.alpha.confidence()) << "% " << method_name(iv.method);
      if (iv.tail != Tail::two_sided) os << " (" << tail_name(iv.tail) << ")";
      os << '\n';
      os << "lower " << lower << '\n' << "upper " << upper << '\n';
      if (!k_text.empty()) os << "k     " << k_text << '\n';
      os << "flags " << (flags.empty() ? "none" : flags) << '\n';
      break;
  }
  if (conditions) {
    os << (format == Format::markdown ? "\n" : "") << "normal approximation conditions (threshold "
       << conditions->options.threshold << "):\n";
    for (const auto& c : conditions->conditions) {
      os << "  (" << c.number << ") " << (c.holds ? "holds " : "fails ") << c.description
         << (c.heuristic ? "  [evaluated at p̂]" : "") << '\n';
    }
    os << "  overall: " << (conditions->all_hold ? "all hold" : "not all hold") << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Published tables

enum class PublishedTable { I, II, III, IV, V, VI, VII, VIII };

inline PublishedTable parse_published_table(std::string_view s) {
  static constexpr std::string_view names[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
  for (std::size_t i = 0; i < std::size(names); ++i) {
    if (s == names[i]) return static_cast<PublishedTable>(i);
  }
  throw domain_error("unknown table '" + std::string(s) + "' (expected I-VIII)");
}

inline std::string_view published_table_name(PublishedTable t) {
  static constexpr std::string_view names[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
  return names[static_cast<int>(t)];
}

inline Alpha published_table_alpha(PublishedTable t) {
  switch (t) {
    case PublishedTable::I:
    case PublishedTable::II:
    case PublishedTable::III:
    case PublishedTable::VII:
      return Alpha(0.05);
    default:
      return Alpha(0.01);
  }
}

inline std::string confidence_label(Alpha alpha) { return percent_text(alpha.confidence()) + "%"; }

inline std::string method_title(Method m) {
  return m == Method::normal ? "Normal approximation" : m == Method::clopper_pearson ? "Clopper & Pearson" : "Numerical integral";
}

inline std::string k_label(std::int64_t k) {
  int e = 0;
  while ((std::int64_t{1} << e) < k) ++e;
  return (std::int64_t{1} << e) == k ? "k: 2^" + std::to_string(e) : "k: " + std::to_string(k);
}

inline std::string render_limit_table(std::span<const LimitRow> rows, Alpha alpha, Format format,
                                      std::string_view label = "") {
  const std::string title = std::string(label) + "Lower and upper limit values of the " + confidence_label(alpha) + " confidence interval";
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["alpha"] = alpha.value();
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      auto pair = [](const Interval& iv) {
        return nlohmann::ordered_json{{"lower", std::stod(fmt::truncated(iv.lower, 5))}, {"upper", std::stod(fmt::truncated(iv.upper, 5))}};
      };
      j["rows"].push_back({{"n", r.obs.trials()},
                           {"x", r.obs.successes()},
                           {"exact-numeric", pair(r.exact)},
                           {"normal", pair(r.normal)},
                           {"clopper-pearson", pair(r.clopper_pearson)}});
    }
    return j.dump(2) + "\n";
  }
  TextTable t{title,
              {"n", "x", "Numerical integral lower", "Numerical integral upper", "Normal approximation lower",
               "Normal approximation upper", "Clopper & Pearson lower", "Clopper & Pearson upper"},
              {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.obs.trials()), std::to_string(r.obs.successes()), fmt::truncated(r.exact.lower, 5),
                      fmt::truncated(r.exact.upper, 5), fmt::truncated(r.normal.lower, 5), fmt::truncated(r.normal.upper, 5),
                      fmt::truncated(r.clopper_pearson.lower, 5), fmt::truncated(r.clopper_pearson.upper, 5)});
  }
  return render_text(t, format);
}

/// Error-percentage table. Excluded rows are omitted. Text formats place
/// the lower and upper blocks side by side; CSV and JSON list them in long
/// form with a side column.
inline std::string render_comparison_table(std::span<const ComparisonRow> rows, Alpha alpha, Method method,
                                           Format format, std::string_view label = "") {
  const std::string title =
      std::string(label) + "Error percentage of the " + confidence_label(alpha) + " confidence interval (" + method_title(method) + ")";
  std::vector<const ComparisonRow*> lower;
  std::vector<const ComparisonRow*> upper;
  for (const auto& r : rows) {
    if (r.excluded) continue;
    (r.side == BoundSide::lower ? lower : upper).push_back(&r);
  }
  auto cells = [](const ComparisonRow& r) {
    return std::vector<std::string>{std::to_string(r.obs.trials()), std::to_string(r.obs.successes()),
                                    fmt::truncated(r.exact, 5), fmt::truncated(r.approx, 5), fmt::signed_truncated(r.error_percent, 3)};
  };
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["alpha"] = alpha.value();
    j["method"] = method_name(method);
    for (auto side : {BoundSide::lower, BoundSide::upper}) {
      auto& arr = j[std::string(side_name(side))] = nlohmann::ordered_json::array();
      for (const auto* r : (side == BoundSide::lower ? lower : upper)) {
        arr.push_back({{"n", r->obs.trials()},
                       {"x", r->obs.successes()},
                       {"exact", r->exact},
                       {"approx", r->approx},
                       {"error_percent", std::stod(fmt::signed_truncated(r->error_percent, 3))}});
      }
    }
    return j.dump(2) + "\n";
  }
  if (format == Format::csv) {
    TextTable t{title, {"side", "n", "x", "exact", "approx", "error_percent"}, {}};
    for (const auto* group : {&lower, &upper}) {
      for (const auto* r : *group) {
        auto c = cells(*r);
        c.insert(c.begin(), std::string(side_name(r->side)));
        t.rows.push_back(std::move(c));
      }
    }
    return render_text(t, format);
  }
  const std::string approx_title = method_title(method);
  TextTable t{title,
              {"n", "x", "Lower: Numerical integral", approx_title, "Error [%]", "n", "x", "Upper: Numerical integral",
               approx_title, "Error [%]"},
              {}};
  const std::size_t count = std::max(lower.size(), upper.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> row;
    for (const auto* group : {&lower, &upper}) {
      if (i < group->size()) {
        auto c = cells(*(*group)[i]);
        row.insert(row.end(), c.begin(), c.end());
      } else {
        row.insert(row.end(), 5, "");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return render_text(t, format);
}

inline std::string render_accuracy_table(std::span<const AccuracyRow> rows, Alpha alpha, std::int64_t k, Format format,
                                         std::string_view label = "") {
  const std::string title = std::string(label) + "Accuracy of the " + confidence_label(alpha) + " confidence interval by numerical integral";
  auto diff = [](const std::optional<int>& d) { return d ? std::to_string(*d) : std::string("none"); };
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["alpha"] = alpha.value();
    j["k"] = k;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.obs.trials()},
                           {"x", r.obs.successes()},
                           {"side", side_name(r.side)},
                           {"value_k", std::stod(fmt::truncated(r.value_k, 8))},
                           {"value_2k", std::stod(fmt::truncated(r.value_2k, 8))},
                           {"first_differing_decimal", r.first_differing_decimal ? nlohmann::ordered_json(*r.first_differing_decimal)
                                                                                 : nlohmann::ordered_json(nullptr)}});
    }
    return j.dump(2) + "\n";
  }
  const std::string kl = k_label(k);
  const std::string k2l = k_label(2 * k);
  TextTable t{title,
              {"n", "x", "Lower " + kl, "Lower " + k2l, "Lower first diff", "Upper " + kl, "Upper " + k2l,
               "Upper first diff"},
              {}};
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    const auto& lo = rows[i];
    const auto& up = rows[i + 1];
    t.rows.push_back({std::to_string(lo.obs.trials()), std::to_string(lo.obs.successes()), fmt::truncated(lo.value_k, 8),
                      fmt::truncated(lo.value_2k, 8), diff(lo.first_differing_decimal), fmt::truncated(up.value_k, 8),
                      fmt::truncated(up.value_2k, 8), diff(up.first_differing_decimal)});
  }
  return render_text(t, format);
}

/// Computes and renders one of the published tables on the published cases.
inline std::string render_published_table(PublishedTable table, const QuadratureOptions& options, ZScore zscore, Format format) {
  const auto cases = published_cases();
  const Alpha alpha = published_table_alpha(table);
  const std::string heading = "TABLE " + std::string(published_table_name(table)) + ". ";
  switch (table) {
    case PublishedTable::I:
    case PublishedTable::IV:
      return render_limit_table(limit_table(cases, alpha, options, zscore), alpha, format, heading);
    case PublishedTable::II:
    case PublishedTable::V:
      return render_comparison_table(comparison_table(cases, alpha, Method::normal, options, zscore), alpha, Method::normal,
                                     format, heading);
    case PublishedTable::III:
    case PublishedTable::VI:
      return render_comparison_table(comparison_table(cases, alpha, Method::clopper_pearson, options, zscore), alpha,
                                     Method::clopper_pearson, format, heading);
    case PublishedTable::VII:
    case PublishedTable::VIII:
      return render_accuracy_table(accuracy_study(cases, alpha, options), alpha, options.k, format, heading);
  }
  throw domain_error("unknown table");
}

}  // namespace laplace_ci
