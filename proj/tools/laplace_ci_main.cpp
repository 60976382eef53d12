// laplace-ci: interval queries, published-table reproduction, comparison and
// accuracy reports, and bulk export.
//
// Exit codes: 0 success, 2 usage or domain error, 3 resource error, 4 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "laplace_ci/laplace_ci.hpp"

namespace {

using namespace laplace_ci;

constexpr int exit_usage = 2;
constexpr int exit_resource = 3;
constexpr int exit_io = 4;

struct CommonFlags {
  std::int64_t k = default_subdivisions;
  std::string format = "human";
  std::string z = "two-decimal";
  std::string rule = "composite-running";
  std::string precision;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--k", f.k, "Simpson sub-intervals (even)")->capture_default_str();
  cmd->add_option("--format", f.format, "human|csv|json|markdown")->capture_default_str();
  cmd->add_option("--z", f.z, "normal critical value: two-decimal|exact")->capture_default_str();
  cmd->add_option("--rule", f.rule, "prefix rule: composite-running|midpoint-simpson")->capture_default_str();
  cmd->add_option("--precision", f.precision,
                  "native|long-double|mpfr:<bits> (default from " + std::string(precision_env_var) + ")");
}

QuadratureOptions quadrature_from(const CommonFlags& f) {
  QuadratureOptions q;
  q.k = f.k;
  q.rule = parse_rule(f.rule);
  q.precision = f.precision.empty() ? precision_from_environment() : parse_precision(f.precision);
  validate_subdivisions(q.k);
  return q;
}

// "5", "1000", "1-100", comma-separated.
std::vector<std::int64_t> parse_n_list(const std::vector<std::string>& specs) {
  std::vector<std::int64_t> out;
  for (const auto& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const std::string token = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!token.empty()) {
        try {
          const auto dash = token.find('-', 1);
          std::size_t used = 0;
          if (dash == std::string::npos) {
            out.push_back(std::stoll(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
          } else {
            const auto first = std::stoll(token.substr(0, dash));
            const auto last = std::stoll(token.substr(dash + 1));
            if (last < first) throw domain_error("empty range '" + token + "'");
            for (auto n = first; n <= last; ++n) out.push_back(n);
          }
        } catch (const std::invalid_argument&) {
          throw domain_error("cannot parse trial count '" + token + "'");
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

// Cases from --case n:x and --n (all x); the published cases when neither is given.
std::vector<Observation> select_cases(const std::vector<std::string>& case_specs, const std::vector<std::string>& n_specs) {
  std::vector<Observation> out;
  for (const auto& c : case_specs) {
    const auto colon = c.find(':');
    if (colon == std::string::npos) throw domain_error("--case expects n:x, got '" + c + "'");
    try {
      out.emplace_back(std::stoll(c.substr(0, colon)), std::stoll(c.substr(colon + 1)));
    } catch (const std::invalid_argument&) {
      throw domain_error("--case expects n:x, got '" + c + "'");
    }
  }
  for (auto n : parse_n_list(n_specs)) {
    for (std::int64_t x = 0; x <= n; ++x) out.emplace_back(n, x);
  }
  return out.empty() ? published_cases() : out;
}

int run(int argc, char** argv) {
  CLI::App app{"Intervals of the Laplace-smoothed binomial estimate by Simpson quadrature, "
               "compared with the normal approximation and Clopper-Pearson."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  // interval
  CommonFlags interval_flags;
  std::int64_t n = 0;
  std::int64_t x = 0;
  double alpha = 0.05;
  std::string method = "exact";
  std::string tail = "two-sided";
  int threshold = 5;
  auto* interval = app.add_subcommand("interval", "Compute one interval");
  interval->add_option("--n", n, "number of trials")->required();
  interval->add_option("--x", x, "number of successes")->required();
  interval->add_option("--alpha", alpha, "miss probability (confidence = 1 - alpha)")->capture_default_str();
  interval->add_option("--method", method, "exact|normal|clopper-pearson")->capture_default_str();
  interval->add_option("--tail", tail, "two-sided|upper-bound|lower-bound (numeric method)")->capture_default_str();
  interval->add_option("--threshold", threshold, "applicability threshold for the normal method: 5|10")
      ->capture_default_str();
  add_common(interval, interval_flags);

  // table
  CommonFlags table_flags;
  std::string table_name;
  auto* table = app.add_subcommand("table", "Reproduce a published table (I-VIII)");
  table->add_option("--paper-table", table_name, "I, II, III, IV, V, VI, VII or VIII")->required();
  add_common(table, table_flags);

  // compare
  CommonFlags compare_flags;
  std::vector<std::string> compare_cases;
  std::vector<std::string> compare_n;
  double compare_alpha = 0.05;
  std::string compare_method = "normal";
  auto* compare = app.add_subcommand("compare", "Error percentages of an approximate method");
  compare->add_option("--case", compare_cases, "n:x (repeatable)");
  compare->add_option("--n", compare_n, "trial counts, all x (e.g. 5,1000 or 1-20)");
  compare->add_option("--alpha", compare_alpha)->capture_default_str();
  compare->add_option("--method", compare_method, "normal|clopper-pearson")->capture_default_str();
  add_common(compare, compare_flags);

  // accuracy
  CommonFlags accuracy_flags;
  std::vector<std::string> accuracy_cases;
  std::vector<std::string> accuracy_n;
  double accuracy_alpha = 0.05;
  auto* accuracy = app.add_subcommand("accuracy", "Numeric interval at k and 2k");
  accuracy->add_option("--case", accuracy_cases, "n:x (repeatable)");
  accuracy->add_option("--n", accuracy_n, "trial counts, all x");
  accuracy->add_option("--alpha", accuracy_alpha)->capture_default_str();
  add_common(accuracy, accuracy_flags);

  // export
  CommonFlags export_flags;
  export_flags.format = "csv";
  std::vector<std::string> export_n;
  std::vector<double> export_alphas{0.05, 0.01};
  std::vector<std::string> export_methods{"clopper-pearson", "exact-numeric", "normal"};
  std::string export_out;
  auto* exporter = app.add_subcommand("export", "Write intervals for every x in 0..n");
  exporter->add_option("--n", export_n, "trial counts (e.g. 5,1000 or 1-100)");
  exporter->add_option("--alpha", export_alphas, "miss probabilities")->capture_default_str();
  exporter->add_option("--method", export_methods, "methods")->capture_default_str();
  exporter->add_option("--out", export_out, "output path")->required();
  add_common(exporter, export_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  if (interval->parsed()) {
    const auto q = quadrature_from(interval_flags);
    const Observation obs(n, x);
    const Alpha a(alpha);
    const Method m = parse_method(method);
    const Tail t = parse_tail(tail);
    const Format f = parse_format(interval_flags.format);
    if (t != Tail::two_sided && m != Method::exact_numeric) throw domain_error("--tail applies to the exact method only");
    Interval iv = t == Tail::two_sided ? compute_interval(obs, a, m, q, parse_zscore(interval_flags.z))
                                       : one_sided_interval(obs, a, t, q);
    std::optional<ConditionReport> report;
    if (m == Method::normal) report = applicability(obs, ApplicabilityOptions{threshold});
    std::cout << render_interval(obs, iv, q.k, f, report ? &*report : nullptr);
    return 0;
  }
  if (table->parsed()) {
    const auto which = parse_published_table(table_name);
    std::cout << render_published_table(which, quadrature_from(table_flags), parse_zscore(table_flags.z),
                                    parse_format(table_flags.format));
    return 0;
  }
  if (compare->parsed()) {
    const auto q = quadrature_from(compare_flags);
    const auto cases = select_cases(compare_cases, compare_n);
    const Alpha a(compare_alpha);
    const Method m = parse_method(compare_method);
    if (m == Method::exact_numeric) throw domain_error("--method must be normal or clopper-pearson");
    const auto rows = comparison_table(cases, a, m, q, parse_zscore(compare_flags.z));
    std::cout << render_comparison_table(rows, a, m, parse_format(compare_flags.format));
    return 0;
  }
  if (accuracy->parsed()) {
    const auto q = quadrature_from(accuracy_flags);
    const auto cases = select_cases(accuracy_cases, accuracy_n);
    const Alpha a(accuracy_alpha);
    const auto rows = accuracy_study(cases, a, q);
    std::cout << render_accuracy_table(rows, a, q.k, parse_format(accuracy_flags.format));
    return 0;
  }
  if (exporter->parsed()) {
    ExportSpec spec;
    spec.n_values = parse_n_list(export_n);
    if (spec.n_values.empty()) throw domain_error("export: at least one n is required");
    spec.alphas.clear();
    for (double v : export_alphas) spec.alphas.emplace_back(v);
    spec.methods.clear();
    for (const auto& m : export_methods) spec.methods.push_back(parse_method(m));
    spec.quadrature = quadrature_from(export_flags);
    spec.zscore = parse_zscore(export_flags.z);
    spec.format = parse_format(export_flags.format);
    spec.out = export_out;
    const auto rows = write_export(spec);
    std::cerr << "wrote " << rows << " rows to " << export_out << " (manifest " << manifest_path(spec.out).string()
              << ")\n";
    return 0;
  }
  return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const laplace_ci::io_error& e) {
    std::cerr << "laplace-ci: " << e.what() << '\n';
    return exit_io;
  } catch (const laplace_ci::resource_error& e) {
    std::cerr << "laplace-ci: " << e.what() << '\n';
    return exit_resource;
  } catch (const laplace_ci::domain_error& e) {
    std::cerr << "laplace-ci: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "laplace-ci: " << e.what() << '\n';
    return 1;
  }
}
