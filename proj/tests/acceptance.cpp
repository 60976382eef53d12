// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <boost/math/special_functions/beta.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "laplace_ci/laplace_ci.hpp"
#include "published_values.hpp"

using namespace laplace_ci;
namespace fs = std::filesystem;

namespace {

constexpr double h = 1.0 / static_cast<double>(default_subdivisions);

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("%s C%d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Worst deviation of a reproduced limit table from the published one.
template <class Rows>
void check_limit_table(int id, const char* name, const Rows& published, Alpha alpha) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = limit_table(published_cases(), alpha, {}, ZScore::two_decimal);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = published[i];
    const auto& r = rows[i];
    const double ours[6] = {r.exact.lower,  r.exact.upper,           r.normal.lower,
                            r.normal.upper, r.clopper_pearson.lower, r.clopper_pearson.upper};
    const double theirs[6] = {p.exact_lower, p.exact_upper, p.normal_lower, p.normal_upper, p.cp_lower, p.cp_upper};
    for (int c = 0; c < 6; ++c) {
      const double d = std::abs(ours[c] - theirs[c]);
      if (d > worst) {
        worst = d;
        where = std::to_string(p.n) + "/" + std::to_string(p.x) + " column " + std::to_string(c + 1);
      }
    }
  }
  const bool pass = worst <= 2e-5 && elapsed <= 60.0;
  report(id, std::string("Table ") + name + " reproduction", pass,
         "max |dev| " + sci(worst) + " at " + where + " (tol 2e-05), " + sci(elapsed) + " s (limit 60 s)");
}

// ---------------------------------------------------------------------------

void criterion_3() {
  const double tol = 2.0 * 9.54e-7;
  double worst = 0.0;
  int min_decimal = 99;
  bool ok = true;
  std::string detail;
  for (auto [alpha, published] : {std::pair{0.05, &published::table_VII}, std::pair{0.01, &published::table_VIII}}) {
    const auto rows = accuracy_study(published_cases(), Alpha(alpha));
    for (std::size_t i = 0; i < published->size(); ++i) {
      const auto& p = (*published)[i];
      const auto& lo = rows[2 * i];
      const auto& up = rows[2 * i + 1];
      const double pairs[4][2] = {{lo.value_k, std::stod(std::string(p.lower_k))},
                                  {lo.value_2k, std::stod(std::string(p.lower_2k))},
                                  {up.value_k, std::stod(std::string(p.upper_k))},
                                  {up.value_2k, std::stod(std::string(p.upper_2k))}};
      for (const auto& pr : pairs) worst = std::max(worst, std::abs(pr[0] - pr[1]));
      for (const auto* r : {&lo, &up}) {
        if (r->first_differing_decimal) min_decimal = std::min(min_decimal, *r->first_differing_decimal);
      }
    }
  }
  ok = worst <= tol && min_decimal >= 6;
  detail = "max |dev| " + sci(worst) + " (tol " + sci(tol) + "), earliest differing decimal " +
           (min_decimal == 99 ? std::string("none") : std::to_string(min_decimal)) + " (need >= 6)";
  report(3, "Tables VII-VIII reproduction", ok, detail);
}

// Printed error percentages are compared in thousandths, the printed unit.
void criterion_4() {
  struct Spec {
    const char* name;
    double alpha;
    Method method;
    std::span<const published::ErrorRow> lower;
    std::span<const published::ErrorRow> upper;
  };
  const Spec specs[] = {
      {"II", 0.05, Method::normal, published::table_II_lower, published::table_II_upper},
      {"III", 0.05, Method::clopper_pearson, published::table_III_lower, published::table_III_upper},
      {"V", 0.01, Method::normal, published::table_V_lower, published::table_V_upper},
      {"VI", 0.01, Method::clopper_pearson, published::table_VI_lower, published::table_VI_upper},
  };
  const auto cases = published_cases();
  long worst_thousandths = 0;
  double worst_raw = 0.0;
  std::string where;
  bool sets_match = true;
  std::string set_detail;
  for (const auto& s : specs) {
    const auto rows = comparison_table(cases, Alpha(s.alpha), s.method, {}, ZScore::two_decimal);
    for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
      const auto published = side == BoundSide::lower ? s.lower : s.upper;
      std::set<std::pair<std::int64_t, std::int64_t>> ours_set;
      std::set<std::pair<std::int64_t, std::int64_t>> theirs_set;
      for (const auto& p : published) theirs_set.insert({p.n, p.x});
      for (const auto& r : rows) {
        if (r.side != side || r.excluded) continue;
        ours_set.insert({r.obs.trials(), r.obs.successes()});
        for (const auto& p : published) {
          if (p.n != r.obs.trials() || p.x != r.obs.successes()) continue;
          const long printed = std::lround(std::stod(fmt::signed_truncated(r.error_percent, 3)) * 1000.0);
          const long expected = std::lround(p.error_percent * 1000.0);
          const long d = std::labs(printed - expected);
          if (d > worst_thousandths) {
            worst_thousandths = d;
            where = std::string(s.name) + " " + std::string(side_name(side)) + " " + std::to_string(p.n) + "/" +
                    std::to_string(p.x);
          }
          worst_raw = std::max(worst_raw, std::abs(r.error_percent - p.error_percent));
        }
      }
      if (ours_set != theirs_set) {
        sets_match = false;
        set_detail += std::string(" ") + s.name + "-" + std::string(side_name(side));
      }
    }
  }
  const bool pass = worst_thousandths <= 2 && sets_match;
  report(4, "Tables II/III/V/VI error percentages", pass,
         "max printed |dev| " + sci(worst_thousandths / 1000.0) + " at " + where + " (tol 0.002; unrounded max " +
             sci(worst_raw) + "), inclusion sets " + (sets_match ? "match" : "differ:" + set_detail));
}

void criterion_5() {
  const Observation obs(1, 0);
  const auto one = one_sided_interval(obs, Alpha(0.05), Tail::upper_bound);
  const auto two = exact_interval(obs, Alpha(0.05));
  const double d1 = std::abs(one.upper - 0.77639);
  const double d2 = std::abs(two.lower - 0.0125);
  const double d3 = std::abs(two.upper - 0.84188);
  // The published lower bound has four decimals; 0.0125 truncates 0.012579.
  const bool lower_ok = fmt::truncated(two.lower, 4) == "0.0125" && std::abs(two.lower - (1 - std::sqrt(0.975))) <= 2 * h;
  const bool pass = d1 <= 2 * h + 1e-5 && d3 <= 2 * h + 1e-5 && lower_ok && one.lower == 0.0;
  report(5, "Appendix case n=1 x=0", pass,
         "one-sided upper " + fmt::truncated(one.upper, 8) + " (|dev| " + sci(d1) + "), equal-tailed (" +
             fmt::truncated(two.lower, 8) + ", " + fmt::truncated(two.upper, 8) + ") (|dev| " + sci(d2) + ", " +
             sci(d3) + "; tol 2h + printed truncation)");
}

// ---------------------------------------------------------------------------
// Sweep shared by criteria 6 and 7.

struct SweepEntry {
  Observation obs;
  double normalization_error;
  std::map<double, Interval> exact;
};

const std::int64_t sweep_n[] = {1, 2, 3, 5, 10, 50, 200, 1000};
const double sweep_alpha[] = {0.05, 0.01};

std::vector<SweepEntry> run_sweep() {
  std::vector<Observation> cases;
  for (auto n : sweep_n) {
    for (std::int64_t x = 0; x <= n; ++x) cases.emplace_back(n, x);
  }
  return parallel_map(cases.size(), [&](std::size_t i) {
    const auto grid = build_grid(cases[i], default_subdivisions);
    SweepEntry e{cases[i], std::abs(static_cast<double>(cases[i].trials() + 1) * grid.total_mass() - 1.0), {}};
    for (double a : sweep_alpha) e.exact.emplace(a, exact_interval(grid, Alpha(a)));
    return e;
  });
}

void criterion_6(const std::vector<SweepEntry>& sweep) {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (const auto& e : sweep) {
    const double n = static_cast<double>(e.obs.trials());
    const double x = static_cast<double>(e.obs.successes());
    for (const auto& [a, iv] : e.exact) {
      double lo;
      double hi;
      if (e.obs.successes() == 0) {
        lo = 1.0 - std::pow(1.0 - a / 2, 1.0 / (n + 1));
        hi = 1.0 - std::pow(a / 2, 1.0 / (n + 1));
      } else if (e.obs.failures() == 0) {
        lo = std::pow(a / 2, 1.0 / (n + 1));
        hi = std::pow(1.0 - a / 2, 1.0 / (n + 1));
      } else {
        lo = boost::math::ibeta_inv(x + 1, n - x + 1, a / 2);
        hi = boost::math::ibeta_inv(x + 1, n - x + 1, 1.0 - a / 2);
      }
      for (double d : {std::abs(iv.lower - lo), std::abs(iv.upper - hi)}) {
        if (d > worst) {
          worst = d;
          where = std::to_string(e.obs.trials()) + "/" + std::to_string(e.obs.successes()) + " alpha " + fmt::shortest(a);
        }
      }
      checked += 2;
    }
  }
  report(6, "Beta-quantile oracle equivalence", worst <= 2 * h,
         std::to_string(checked) + " bounds, max |dev| " + sci(worst / h) + "h at " + where + " (tol 2h)");
}

void criterion_7(const std::vector<SweepEntry>& sweep) {
  std::map<std::string, int> violations;
  std::map<Observation, const SweepEntry*> by_obs;
  for (const auto& e : sweep) by_obs[e.obs] = &e;
  double worst_normalization = 0.0;

  for (const auto& e : sweep) {
    worst_normalization = std::max(worst_normalization, e.normalization_error);
    if (e.normalization_error > 1e-9) ++violations["normalization"];
    const auto& mirror = *by_obs.at(e.obs.reflected());
    for (double a : sweep_alpha) {
      const Alpha alpha(a);
      const auto& ex = e.exact.at(a);
      const auto cp = clopper_pearson(e.obs, alpha);
      const auto nm = normal_interval(e.obs, alpha, ZScore::two_decimal);

      if (!(ex.lower > 0.0 && ex.upper < 1.0)) ++violations["zero-frequency"];
      if (!(cp.lower <= ex.lower && cp.upper >= ex.upper)) ++violations["envelope"];
      const double p = laplace_estimate(e.obs);
      if (!(ex.lower < p && p < ex.upper)) ++violations["containment"];

      const auto& ex_m = mirror.exact.at(a);
      if (std::abs(ex.lower - (1.0 - ex_m.upper)) > 2 * h) ++violations["reflection exact"];
      const auto cp_m = clopper_pearson(e.obs.reflected(), alpha);
      if (std::abs(cp.lower - (1.0 - cp_m.upper)) > 1e-9) ++violations["reflection cp"];
      const auto nm_m = normal_interval(e.obs.reflected(), alpha, ZScore::two_decimal);
      if (std::abs(nm.lower - (1.0 - nm_m.upper)) > 1e-9) ++violations["reflection normal"];
    }
    // Nesting: the 99% interval contains the 95% interval for every method.
    const auto nested = [](const Interval& wide, const Interval& narrow) {
      return wide.lower <= narrow.lower && narrow.upper <= wide.upper;
    };
    if (!nested(e.exact.at(0.01), e.exact.at(0.05))) ++violations["nesting exact"];
    if (!nested(clopper_pearson(e.obs, Alpha(0.01)), clopper_pearson(e.obs, Alpha(0.05)))) ++violations["nesting cp"];
    if (!nested(normal_interval(e.obs, Alpha(0.01)), normal_interval(e.obs, Alpha(0.05)))) ++violations["nesting normal"];
  }
  int total = 0;
  std::string detail;
  for (const auto& [name, count] : violations) {
    total += count;
    detail += " " + name + "=" + std::to_string(count);
  }
  report(7, "Property suite", total == 0,
         std::to_string(sweep.size()) + " cases x 2 alphas, " + std::to_string(total) + " violations" +
             (detail.empty() ? "" : ":" + detail) + ", worst normalization " + sci(worst_normalization));
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string command = std::string(LAPLACE_CI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_8() {
  const fs::path dir = fs::temp_directory_path() / ("laplace_ci_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  const std::string args = "export --n 1,2,3,5,10,50 --alpha 0.05 0.01 --out ";
  const int sa = run_cli(args + a.string());
  const int sb = run_cli(args + b.string());
  const std::string ta = slurp(a);
  const std::string tb = slurp(b);
  const bool identical = sa == 0 && sb == 0 && !ta.empty() && ta == tb &&
                         slurp(dir / "a.csv.manifest.json") == slurp(dir / "b.csv.manifest.json");

  std::istringstream in(ta);
  bool lossless = false;
  std::size_t rows = 0;
  try {
    const auto records = parse_csv(in);
    rows = records.size();
    lossless = render_csv(records) == ta;
  } catch (const std::exception&) {
    lossless = false;
  }
  fs::remove_all(dir);
  report(8, "Export determinism and CSV round-trip", identical && lossless,
         std::string("repeated export ") + (identical ? "byte-identical" : "DIFFERS") + ", " + std::to_string(rows) +
             " rows round-trip " + (lossless ? "lossless" : "LOSSY"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<int, std::function<void()>>> early = {
      {1, [] { check_limit_table(1, "I", published::table_I, Alpha(0.05)); }},
      {2, [] { check_limit_table(2, "IV", published::table_IV, Alpha(0.01)); }},
      {3, criterion_3},
      {4, criterion_4},
      {5, criterion_5},
  };
  for (const auto& [id, fn] : early) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, "criterion", false, std::string("exception: ") + e.what());
    }
  }
  try {
    const auto sweep = run_sweep();
    criterion_6(sweep);
    criterion_7(sweep);
  } catch (const std::exception& e) {
    report(6, "Beta-quantile oracle equivalence", false, std::string("exception: ") + e.what());
    report(7, "Property suite", false, std::string("exception: ") + e.what());
  }
  try {
    criterion_8();
  } catch (const std::exception& e) {
    report(8, "Export determinism and CSV round-trip", false, std::string("exception: ") + e.what());
  }
  std::printf("%d of 8 criteria passed in %.1f s\n", 8 - failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
