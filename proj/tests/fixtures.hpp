#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cfx/csv.hpp"
#include "cfx/dataset.hpp"
#include "cfx/filter.hpp"

namespace fixture {

using Rng = std::mt19937_64;

// Columns given as text; "NA" cells become missing.
inline cfx::Dataset table(std::vector<std::pair<std::string, std::vector<std::string>>> columns,
                          std::string name = "fixture") {
  std::vector<cfx::Column> cols;
  for (auto& [col_name, values] : columns) {
    std::vector<cfx::Cell> cells;
    for (auto& v : values) {
      if (v == "NA") {
        cells.emplace_back(std::nullopt);
      } else {
        cells.emplace_back(v);
      }
    }
    cols.emplace_back(col_name, std::move(cells));
  }
  return cfx::Dataset(std::move(name), std::move(cols));
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline bool coin(Rng& rng, double p) { return uniform(rng) < p; }

// Mixed-type table: numerical, binary and multi-valued labels, small integer
// codes, with sporadic missing cells. Every column keeps an observed value.
inline std::string random_csv(Rng& rng, std::size_t min_rows, std::size_t max_rows, std::size_t min_cols,
                              std::size_t max_cols) {
  const std::size_t n = min_rows + pick(rng, max_rows - min_rows + 1);
  const std::size_t f = min_cols + pick(rng, max_cols - min_cols + 1);
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cols(f);
  static const std::vector<std::string> multi = {"east", "north", "south", "west", "x,y"};
  for (std::size_t c = 0; c < f; ++c) {
    header.push_back("c" + std::to_string(c));
    const std::size_t kind = pick(rng, 4);
    const double missing = coin(rng, 0.3) ? 0.08 : 0.0;
    const std::size_t levels = 2 + pick(rng, 4);
    for (std::size_t r = 0; r < n; ++r) {
      if (r > 0 && coin(rng, missing)) {
        cols[c].emplace_back("");
        continue;
      }
      switch (kind) {
        case 0: cols[c].push_back(fmt(uniform(rng, -5.0, 20.0))); break;
        case 1: cols[c].push_back(coin(rng, 0.4) ? "yes" : "no"); break;
        case 2: cols[c].push_back(multi[pick(rng, levels)]); break;
        default: cols[c].push_back(std::to_string(pick(rng, levels))); break;
      }
    }
  }
  std::string out;
  cfx::csv::append_record(out, header);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::string> record;
    for (std::size_t c = 0; c < f; ++c) record.push_back(cols[c][r]);
    cfx::csv::append_record(out, record);
  }
  return out;
}

// A constraint on `column` built from values that occur in the data, so it
// usually matches some rows but not all.
inline cfx::FilterConstraint random_constraint(const cfx::Dataset& ds, const cfx::Column& col, Rng& rng) {
  std::vector<std::size_t> present;
  for (std::size_t r = 0; r < col.size(); ++r)
    if (!col.missing(r)) present.push_back(r);
  if (!col.categorical() || (col.numeric_coded() && coin(rng, 0.3))) {
    double a = col.number(present[pick(rng, present.size())]);
    double b = col.number(present[pick(rng, present.size())]);
    if (a > b) std::swap(a, b);
    if (coin(rng, 0.15)) a = -INFINITY;
    if (coin(rng, 0.15)) b = INFINITY;
    return cfx::FilterConstraint::range(col.name(), a, b);
  }
  std::vector<std::string> values;
  const auto& cats = col.categories();
  for (const auto& c : cats)
    if (coin(rng, 0.5)) values.push_back(c);
  if (values.empty()) values.push_back(cats[pick(rng, cats.size())]);
  (void)ds;
  return cfx::FilterConstraint::categories(col.name(), values);
}

// Confounder world: hidden Z, outcome = Z flipped w.p. 0.05, F = Z flipped
// w.p. 0.3, five numeric noise features centred on Z. With `direct` the
// outcome follows F instead and Z is independent of both.
inline std::string scenario_csv(std::uint64_t seed, bool direct, std::size_t n = 2000) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::string out;
  cfx::csv::append_record(out, {"F", "N1", "N2", "N3", "N4", "N5", "outcome"});
  for (std::size_t i = 0; i < n; ++i) {
    const int z = coin(rng, 0.5);
    int f = coin(rng, 0.3) ? 1 - z : z;
    int y = coin(rng, 0.05) ? 1 - z : z;
    if (direct) {
      f = coin(rng, 0.5);
      y = coin(rng, 0.05) ? 1 - f : f;
    }
    std::vector<std::string> rec{std::to_string(f)};
    for (int k = 0; k < 5; ++k) rec.push_back(fmt(z + noise(rng)));
    rec.push_back(std::to_string(y));
    cfx::csv::append_record(out, rec);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Twenty columns of the public two-year recidivism file.
inline const std::vector<std::string>& recidivism_columns() {
  static const std::vector<std::string> cols = {
      "sex",          "age",          "age_cat",        "race",
      "juv_fel_count", "decile_score", "juv_misd_count", "juv_other_count",
      "priors_count", "days_b_screening_arrest", "c_days_from_compas", "c_charge_degree",
      "is_recid",     "is_violent_recid", "score_text", "v_decile_score",
      "v_score_text", "start",        "end",            "two_year_recid"};
  return cols;
}

// Projects the raw file onto recidivism_columns() (first occurrence of a
// repeated header) and draws a uniform sample of `n` rows. nullopt when the
// schema lacks a needed column.
inline std::optional<std::string> recidivism_sample(const cfx::csv::Table& raw, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  for (const auto& name : recidivism_columns()) {
    auto it = std::find(raw.header.begin(), raw.header.end(), name);
    if (it == raw.header.end()) return std::nullopt;
    idx.push_back(static_cast<std::size_t>(it - raw.header.begin()));
  }
  std::vector<std::size_t> rows(raw.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  std::sample(rows.begin(), rows.end(), std::back_inserter(chosen), std::min(n, rows.size()), rng);
  std::string out;
  cfx::csv::append_record(out, recidivism_columns());
  for (std::size_t r : chosen) {
    std::vector<std::string> rec;
    for (std::size_t c : idx) rec.push_back(raw.rows[r][c]);
    cfx::csv::append_record(out, rec);
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("cfx-" + tag + "-" + std::to_string(rng() % 1000000000));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs a shell command capturing stdout; stderr is discarded.
inline CommandResult run(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace fixture

namespace fixture {

// County-level stand-in: stay-at-home order flag, unemployment rate, weekly
// claims, density and income, with a high/low case-growth outcome.
inline std::string covid_csv(std::uint64_t seed, std::size_t n = 600) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::string out;
  cfx::csv::append_record(out, {"sip", "unemp", "wuim", "density", "income", "growth"});
  for (std::size_t i = 0; i < n; ++i) {
    const double urban = uniform(rng);
    const int sip = coin(rng, 0.2 + 0.6 * urban);
    const double unemp = 4 + 6 * uniform(rng) + 2 * sip;
    const double wuim = 5 * unemp + 30 * z(rng);
    const double density = 50 + 900 * urban + 40 * z(rng);
    const double income = 40 + 30 * urban + 5 * z(rng);
    const double p_high = 0.1 + 0.1 * urban + (sip && unemp >= 9 ? 0.65 : 0.0);
    out += std::to_string(sip) + "," + fmt(unemp) + "," + fmt(wuim) + "," + fmt(density) + "," + fmt(income) + "," +
           (coin(rng, p_high) ? "high" : "low") + "\n";
  }
  return out;
}

}  // namespace fixture
