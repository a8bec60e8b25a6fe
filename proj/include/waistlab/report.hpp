#pragma once

// Experiment reports: config echo, per-trial table, summary, seed and wall
// time. JSON holds everything; CSV holds the trial table with a fixed column
// order and %.17g numbers so reruns compare byte-for-byte.

#include "waistlab/core.hpp"
#include "waistlab/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace waistlab {

using json = nlohmann::ordered_json;

struct TrialTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("no column named '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::vector<double> values(const std::string& name) const {
    std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  bool has(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
  }
};

struct ExperimentReport {
  std::string experiment;
  json config;
  TrialTable trials;
  json summary = json::object();
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
};

/// %.17g, with inf/nan spelled the same way everywhere.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON has no inf/nan; those become strings.
inline json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline std::string trials_csv(const TrialTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const ExperimentReport& r) {
  json rows = json::array();
  for (const auto& row : r.trials.rows) {
    json jr = json::array();
    for (double v : row) jr.push_back(number_json(v));
    rows.push_back(std::move(jr));
  }
  return {{"experiment", r.experiment},
          {"seed", r.seed},
          {"config", r.config},
          {"summary", r.summary},
          {"trials", {{"columns", r.trials.columns}, {"rows", rows}}},
          {"wall_time_seconds", r.wall_time_seconds}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

/// Writes report.json and trials.csv into dir (created if needed).
inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text(dir / "trials.csv", trials_csv(r.trials));
}

// ---------------------------------------------------------------------------
// Summary statistics.

/// Linear-interpolation quantile (R type 7) of unsorted data.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  if (v[lo] == v[hi]) return v[lo];
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

inline json quantile_summary(const std::vector<double>& v) {
  json j = json::object();
  j["count"] = v.size();
  if (v.empty()) return j;
  double sum = 0.0;
  for (double x : v) sum += x;
  j["min"] = number_json(quantile(v, 0.0));
  j["q05"] = number_json(quantile(v, 0.05));
  j["q25"] = number_json(quantile(v, 0.25));
  j["median"] = number_json(quantile(v, 0.5));
  j["q75"] = number_json(quantile(v, 0.75));
  j["q95"] = number_json(quantile(v, 0.95));
  j["max"] = number_json(quantile(v, 1.0));
  j["mean"] = number_json(sum / v.size());
  return j;
}

inline json estimate_json(const Estimate& e) { return {{"value", number_json(e.value)}, {"se", number_json(e.standard_error)}}; }

}  // namespace waistlab
