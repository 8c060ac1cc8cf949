#include "cfx/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cfx/csv.hpp"
#include "cfx/error.hpp"

namespace cfx {

std::string_view type_name(ColumnType type) {
  switch (type) {
    case ColumnType::Numerical: return "numerical";
    case ColumnType::CategoricalBinary: return "categorical_binary";
    case ColumnType::CategoricalMulti: return "categorical_multi";
  }
  return "unknown";
}

std::optional<TypeHint> parse_type_hint(std::string_view text) {
  if (text == "numerical" || text == "numeric") return TypeHint::Numerical;
  if (text == "categorical") return TypeHint::Categorical;
  return std::nullopt;
}

bool is_missing_token(std::string_view raw) { return raw.empty() || raw == "NA"; }

std::optional<double> parse_number(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

namespace {

struct ValueProfile {
  std::size_t observed = 0;
  bool numeric = true;
  std::set<double> distinct_numbers;
  std::set<std::string, std::less<>> distinct_labels;
};

ValueProfile profile(std::span<const Cell> values) {
  ValueProfile p;
  for (const auto& cell : values) {
    if (!cell) continue;
    ++p.observed;
    p.distinct_labels.insert(*cell);
    if (p.numeric) {
      if (auto v = parse_number(*cell)) {
        // Only needs to resolve "more than the cutoff".
        if (p.distinct_numbers.size() <= kCategoricalCutoff) p.distinct_numbers.insert(*v);
      } else {
        p.numeric = false;
      }
    }
  }
  if (p.observed == 0) p.numeric = false;
  return p;
}

ColumnType categorical_kind(const ValueProfile& p) {
  return p.distinct_labels.size() == 2 ? ColumnType::CategoricalBinary : ColumnType::CategoricalMulti;
}

}  // namespace

ColumnType infer_column_type(std::span<const Cell> values) {
  const ValueProfile p = profile(values);
  if (p.observed == 0) throw Error(ErrorCode::AllMissing, "column has no non-missing values");
  if (p.numeric && p.distinct_numbers.size() > kCategoricalCutoff) return ColumnType::Numerical;
  return categorical_kind(p);
}

Column::Column(std::string name, std::vector<Cell> cells, std::optional<TypeHint> hint)
    : name_(std::move(name)), cells_(std::move(cells)) {
  const ValueProfile p = profile(cells_);
  missing_count_ = cells_.size() - p.observed;
  numeric_coded_ = p.numeric;

  if (hint == TypeHint::Numerical) {
    if (!numeric_coded_) {
      throw Error(ErrorCode::TypeMismatch, "column '" + name_ + "' cannot be numerical: non-numeric cells");
    }
    type_ = ColumnType::Numerical;
  } else if (hint == TypeHint::Categorical || p.observed == 0) {
    type_ = categorical_kind(p);
  } else {
    type_ = infer_column_type(cells_);
  }

  if (numeric_coded_) {
    numbers_.resize(cells_.size(), kNaN);
    bool first = true;
    for (std::size_t r = 0; r < cells_.size(); ++r) {
      if (!cells_[r]) continue;
      const double v = *parse_number(*cells_[r]);
      numbers_[r] = v;
      min_ = first ? v : std::min(min_, v);
      max_ = first ? v : std::max(max_, v);
      first = false;
    }
  }

  if (categorical()) {
    categories_.assign(p.distinct_labels.begin(), p.distinct_labels.end());
    if (numeric_coded_) {
      std::stable_sort(categories_.begin(), categories_.end(), [](const auto& a, const auto& b) {
        return *parse_number(a) < *parse_number(b);
      });
    }
    std::map<std::string_view, std::int32_t> lookup;
    for (std::size_t i = 0; i < categories_.size(); ++i) {
      lookup.emplace(categories_[i], static_cast<std::int32_t>(i));
    }
    codes_.resize(cells_.size(), -1);
    for (std::size_t r = 0; r < cells_.size(); ++r) {
      if (cells_[r]) codes_[r] = lookup.at(*cells_[r]);
    }
  }
}

std::optional<std::int32_t> Column::code_of(std::string_view label) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == label) return static_cast<std::int32_t>(i);
  }
  return std::nullopt;
}

Dataset::Dataset(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  if (columns_.empty()) throw Error(ErrorCode::MalformedCsv, "dataset has no columns");
  rows_ = columns_.front().size();
  if (rows_ == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no data rows");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& col = columns_[i];
    if (col.size() != rows_) {
      throw Error(ErrorCode::MalformedCsv, "column '" + col.name() + "' has a different length");
    }
    if (!index_.emplace(col.name(), i).second) {
      throw Error(ErrorCode::MalformedCsv, "duplicate column name '" + col.name() + "'");
    }
  }
}

const Column& Dataset::column(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UnknownColumn, "unknown column '" + std::string(name) + "'");
  return columns_[it->second];
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset load_csv(std::string_view text, std::string name, const LoadOptions& options) {
  csv::Table table = csv::parse(text);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyDataset, "CSV has a header but no data rows");

  std::set<std::string_view> seen;
  for (const auto& h : table.header) {
    if (!seen.insert(h).second) throw Error(ErrorCode::MalformedCsv, "duplicate column name '" + h + "'");
  }
  for (const auto& [column, hint] : options.type_hints) {
    if (!seen.contains(column)) {
      throw Error(ErrorCode::UnknownColumn, "type override for unknown column '" + column + "'");
    }
  }

  std::vector<Column> columns;
  columns.reserve(table.header.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::vector<Cell> cells;
    cells.reserve(table.rows.size());
    for (auto& row : table.rows) {
      if (is_missing_token(row[c])) {
        cells.emplace_back(std::nullopt);
      } else {
        cells.emplace_back(std::move(row[c]));
      }
    }
    std::optional<TypeHint> hint;
    if (auto it = options.type_hints.find(table.header[c]); it != options.type_hints.end()) hint = it->second;
    columns.emplace_back(table.header[c], std::move(cells), hint);
  }
  return Dataset(std::move(name), std::move(columns));
}

Dataset load_csv_file(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_csv(buffer.str(), path.stem().string(), options);
}

std::string to_csv(const Dataset& dataset) {
  std::string out;
  std::vector<std::string> fields;
  for (const auto& col : dataset.columns()) fields.push_back(col.name());
  csv::append_record(out, fields);
  for (RowIndex r = 0; r < dataset.row_count(); ++r) {
    fields.clear();
    for (const auto& col : dataset.columns()) fields.push_back(col.cell(r).value_or(""));
    csv::append_record(out, fields);
  }
  return out;
}

std::vector<double> shared_bin_edges(const Column& column) {
  double lo = column.min();
  double hi = column.max();
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(kDistributionBins + 1);
  const double width = (hi - lo) / static_cast<double>(kDistributionBins);
  for (std::size_t i = 0; i < kDistributionBins; ++i) edges[i] = lo + width * static_cast<double>(i);
  edges[kDistributionBins] = hi;
  return edges;
}

std::size_t bin_index(std::span<const double> edges, double value) {
  // Bins are left-closed; the last bin also holds the upper edge.
  const auto interior = edges.subspan(1, edges.size() - 2);
  return static_cast<std::size_t>(std::upper_bound(interior.begin(), interior.end(), value) - interior.begin());
}

DistributionSummary column_distribution(const Dataset& dataset, std::string_view name,
                                        std::optional<std::span<const RowIndex>> subset) {
  const Column& col = dataset.column(name);
  RowSet all;
  if (!subset) {
    all.resize(dataset.row_count());
    for (RowIndex r = 0; r < all.size(); ++r) all[r] = r;
    subset = all;
  }
  for (RowIndex r : *subset) {
    if (r >= dataset.row_count()) {
      throw Error(ErrorCode::RowOutOfRange, "row " + std::to_string(r) + " out of range");
    }
  }

  DistributionSummary summary;
  summary.column = col.name();
  summary.type = col.type();
  for (RowIndex r : *subset) {
    if (col.missing(r)) ++summary.missing;
  }
  summary.observed = subset->size() - summary.missing;
  if (summary.observed == 0) {
    throw Error(ErrorCode::EmptySubset, "no non-missing '" + col.name() + "' values in subset");
  }
  const double total = static_cast<double>(summary.observed);

  if (col.categorical()) {
    std::vector<std::size_t> counts(col.categories().size(), 0);
    for (RowIndex r : *subset) {
      if (auto code = col.code(r); code >= 0) ++counts[static_cast<std::size_t>(code)];
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      summary.categories.push_back({col.categories()[i], counts[i], static_cast<double>(counts[i]) / total});
    }
    return summary;
  }

  NumericBins bins;
  bins.edges = shared_bin_edges(col);
  bins.counts.assign(kDistributionBins, 0);
  bool first = true;
  double sum = 0.0;
  for (RowIndex r : *subset) {
    if (col.missing(r)) continue;
    const double v = col.number(r);
    ++bins.counts[bin_index(bins.edges, v)];
    sum += v;
    bins.min = first ? v : std::min(bins.min, v);
    bins.max = first ? v : std::max(bins.max, v);
    first = false;
  }
  bins.mean = sum / total;
  for (std::size_t c : bins.counts) bins.fractions.push_back(static_cast<double>(c) / total);
  summary.bins = std::move(bins);
  return summary;
}

}  // namespace cfx
