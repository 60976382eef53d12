#pragma once

// Bulk export of intervals for every x in 0..n over a set of trial counts,
// confidence levels and methods, plus a manifest describing how the file
// was produced.
//
// CSV schema (fixed column order):
//   n,x,alpha,method,lower,upper,k,flags
// bounds in fixed-point with 8 truncated decimals, k only for the numeric
// method, flags semicolon-joined. Rows are ordered by n, x, alpha, method name.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laplace_ci/errors.hpp"
#include "laplace_ci/format.hpp"
#include "laplace_ci/intervals.hpp"
#include "laplace_ci/parallel.hpp"
#include "laplace_ci/quadrature.hpp"
#include "laplace_ci/report.hpp"

namespace laplace_ci {

inline constexpr std::string_view export_columns = "n,x,alpha,method,lower,upper,k,flags";

struct ExportSpec {
  std::vector<std::int64_t> n_values;
  std::vector<Alpha> alphas{Alpha(0.05), Alpha(0.01)};
  std::vector<Method> methods{all_methods.begin(), all_methods.end()};
  QuadratureOptions quadrature{};
  ZScore zscore = ZScore::two_decimal;
  Format format = Format::csv;
  std::filesystem::path out;
};

/// One exported interval. Bounds hold the value as written (8 decimals).
struct ExportRecord {
  std::int64_t n = 0;
  std::int64_t x = 0;
  double alpha = 0.0;
  Method method = Method::exact_numeric;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t k = 0;  // 0 when not applicable
  std::string flags;

  friend bool operator==(const ExportRecord&, const ExportRecord&) = default;
};

/// Validates the settings and puts alphas and methods into output order.
inline ExportSpec normalized(ExportSpec spec) {
  if (spec.n_values.empty()) throw domain_error("export: at least one n is required");
  if (spec.alphas.empty()) throw domain_error("export: at least one alpha is required");
  if (spec.methods.empty()) throw domain_error("export: at least one method is required");
  if (spec.format == Format::human) throw domain_error("export: format must be csv, json or markdown");
  validate_subdivisions(spec.quadrature.k);
  for (auto n : spec.n_values) {
    if (n < 1) throw domain_error("export: n must be at least 1");
  }
  std::sort(spec.n_values.begin(), spec.n_values.end());
  spec.n_values.erase(std::unique(spec.n_values.begin(), spec.n_values.end()), spec.n_values.end());
  std::sort(spec.alphas.begin(), spec.alphas.end());
  spec.alphas.erase(std::unique(spec.alphas.begin(), spec.alphas.end()), spec.alphas.end());
  std::sort(spec.methods.begin(), spec.methods.end(),
            [](Method a, Method b) { return method_name(a) < method_name(b); });
  spec.methods.erase(std::unique(spec.methods.begin(), spec.methods.end()), spec.methods.end());
  return spec;
}

namespace detail {

inline double as_written(double v) { return std::stod(fmt::truncated(v, 8)); }

// Records for one (n, x), alphas and methods already in output order. The
// numeric method locates every alpha from one streaming pass pair.
inline std::vector<ExportRecord> records_for(const ExportSpec& spec, const Observation& obs) {
  std::vector<CrossingPair> crossings;
  const bool want_exact = std::find(spec.methods.begin(), spec.methods.end(), Method::exact_numeric) != spec.methods.end();
  const std::int64_t k = spec.quadrature.k;
  if (want_exact) {
    std::vector<TailQuery> queries;
    for (const auto& a : spec.alphas) queries.push_back({0.5 * a.value(), 0.5 * a.value()});
    crossings = with_backend(spec.quadrature.precision, [&]<class Real>() {
      return locate_crossings_streaming<Real>(obs, k, spec.quadrature.rule, queries);
    });
  }
  std::vector<ExportRecord> out;
  for (std::size_t ai = 0; ai < spec.alphas.size(); ++ai) {
    const Alpha alpha = spec.alphas[ai];
    for (Method m : spec.methods) {
      Interval iv;
      if (m == Method::exact_numeric) {
        const double kd = static_cast<double>(k);
        iv = make_interval(static_cast<double>(crossings[ai].lower) / kd, static_cast<double>(crossings[ai].upper) / kd,
                           Method::exact_numeric, alpha);
      } else {
        iv = compute_interval(obs, alpha, m, spec.quadrature, spec.zscore);
      }
      out.push_back({obs.trials(), obs.successes(), alpha.value(), m, as_written(iv.lower), as_written(iv.upper),
                     m == Method::exact_numeric ? k : 0, iv.flags.to_string()});
    }
  }
  return out;
}

}  // namespace detail

/// All records of the export in output order, delivered one n at a time.
/// Values for different x are computed concurrently.
inline void generate_records(const ExportSpec& raw, const std::function<void(std::span<const ExportRecord>)>& sink) {
  const ExportSpec spec = normalized(raw);
  const unsigned workers = spec.quadrature.precision.backend == Backend::mpfr ? 1u : 0u;
  for (auto n : spec.n_values) {
    const auto per_x = parallel_map(
        static_cast<std::size_t>(n + 1),
        [&](std::size_t x) { return detail::records_for(spec, Observation(n, static_cast<std::int64_t>(x))); }, workers);
    for (const auto& chunk : per_x) sink(chunk);
  }
}

inline std::vector<ExportRecord> generate_records(const ExportSpec& spec) {
  std::vector<ExportRecord> all;
  generate_records(spec, [&](std::span<const ExportRecord> chunk) { all.insert(all.end(), chunk.begin(), chunk.end()); });
  return all;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::vector<std::string> record_cells(const ExportRecord& r) {
  return {std::to_string(r.n),
          std::to_string(r.x),
          fmt::shortest(r.alpha),
          std::string(method_name(r.method)),
          fmt::truncated(r.lower, 8),
          fmt::truncated(r.upper, 8),
          r.k > 0 ? std::to_string(r.k) : std::string(),
          r.flags};
}

inline std::string csv_line(const ExportRecord& r) {
  const auto cells = record_cells(r);
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

inline std::string json_line(const ExportRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["x"] = r.x;
  j["alpha"] = r.alpha;
  j["method"] = method_name(r.method);
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  if (r.k > 0) j["k"] = r.k;
  j["flags"] = r.flags;
  return j.dump();
}

/// Writes records in the requested format.
class RecordWriter {
 public:
  RecordWriter(std::ostream& os, Format format) : os_(os), format_(format) {
    switch (format_) {
      case Format::csv:
        os_ << export_columns << '\n';
        break;
      case Format::markdown:
        os_ << "| n | x | alpha | method | lower | upper | k | flags |\n|---|---|---|---|---|---|---|---|\n";
        break;
      case Format::json:
        os_ << "[";
        break;
      case Format::human:
        throw domain_error("export: format must be csv, json or markdown");
    }
  }

  void write(const ExportRecord& r) {
    switch (format_) {
      case Format::csv:
        os_ << csv_line(r) << '\n';
        break;
      case Format::markdown: {
        os_ << '|';
        for (const auto& c : record_cells(r)) os_ << ' ' << c << " |";
        os_ << '\n';
        break;
      }
      case Format::json:
        os_ << (count_ ? ",\n  " : "\n  ") << json_line(r);
        break;
      case Format::human:
        break;
    }
    ++count_;
  }

  void finish() {
    if (format_ == Format::json) os_ << (count_ ? "\n]\n" : "]\n");
  }

  std::size_t count() const noexcept { return count_; }

 private:
  std::ostream& os_;
  Format format_;
  std::size_t count_ = 0;
};

inline std::string render_csv(std::span<const ExportRecord> records) {
  std::ostringstream os;
  RecordWriter w(os, Format::csv);
  for (const auto& r : records) w.write(r);
  w.finish();
  return os.str();
}

/// Parses an exported CSV file. Throws domain_error on malformed input.
inline std::vector<ExportRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != export_columns) throw domain_error("csv: unexpected header");
  std::vector<ExportRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 8) throw domain_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " fields");
    try {
      ExportRecord r;
      r.n = std::stoll(cells[0]);
      r.x = std::stoll(cells[1]);
      r.alpha = std::stod(cells[2]);
      r.method = parse_method(cells[3]);
      r.lower = std::stod(cells[4]);
      r.upper = std::stod(cells[5]);
      r.k = cells[6].empty() ? 0 : std::stoll(cells[6]);
      r.flags = cells[7];
      out.push_back(std::move(r));
    } catch (const std::invalid_argument&) {
      throw domain_error("csv: malformed number on line " + std::to_string(line_no));
    } catch (const std::out_of_range&) {
      throw domain_error("csv: number out of range on line " + std::to_string(line_no));
    }
  }
  return out;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

inline std::string manifest_json(const ExportSpec& spec, std::size_t rows) {
  nlohmann::ordered_json j;
  j["tool"] = "laplace-ci";
  j["version"] = version;
  j["format"] = format_name(spec.format);
  j["columns"] = export_columns;
  j["k"] = spec.quadrature.k;
  j["prefix_rule"] = rule_name(spec.quadrature.rule);
  j["precision"] = spec.quadrature.precision.label();
  j["z_score"] = zscore_name(spec.zscore);
  j["n_values"] = spec.n_values;
  for (const auto& a : spec.alphas) j["alphas"].push_back(a.value());
  for (auto m : spec.methods) j["methods"].push_back(method_name(m));
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

/// Writes the export and its manifest. Output goes to a temporary file that
/// is renamed into place; on any failure no partial files remain.
/// Returns the number of records written.
inline std::size_t write_export(const ExportSpec& raw) {
  const ExportSpec spec = normalized(raw);
  if (spec.out.empty()) throw domain_error("export: an output path is required");
  namespace fs = std::filesystem;
  fs::path partial = spec.out;
  partial += ".partial";
  const fs::path manifest = manifest_path(spec.out);
  fs::path manifest_partial = manifest;
  manifest_partial += ".partial";

  auto cleanup = [&] {
    std::error_code ec;
    fs::remove(partial, ec);
    fs::remove(manifest_partial, ec);
  };

  std::size_t rows = 0;
  try {
    {
      std::ofstream os(partial, std::ios::binary | std::ios::trunc);
      if (!os) throw io_error(partial.string(), "cannot open for writing");
      RecordWriter writer(os, spec.format);
      generate_records(spec, [&](std::span<const ExportRecord> chunk) {
        for (const auto& r : chunk) writer.write(r);
        if (!os) throw io_error(partial.string(), "write failed");
      });
      writer.finish();
      os.flush();
      if (!os) throw io_error(partial.string(), "write failed");
      rows = writer.count();
    }
    {
      std::ofstream ms(manifest_partial, std::ios::binary | std::ios::trunc);
      if (!ms) throw io_error(manifest_partial.string(), "cannot open for writing");
      ms << manifest_json(spec, rows);
      ms.flush();
      if (!ms) throw io_error(manifest_partial.string(), "write failed");
    }
    std::error_code ec;
    fs::rename(partial, spec.out, ec);
    if (ec) throw io_error(spec.out.string(), ec.message());
    fs::rename(manifest_partial, manifest, ec);
    if (ec) {
      fs::remove(spec.out, ec);
      throw io_error(manifest.string(), "cannot move manifest into place");
    }
  } catch (...) {
    cleanup();
    throw;
  }
  return rows;
}

}  // namespace laplace_ci
