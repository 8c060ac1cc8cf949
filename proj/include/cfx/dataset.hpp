#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfx {

using RowIndex = std::size_t;
/// Row indices, ascending unless a function documents another order.
using RowSet = std::vector<RowIndex>;
using Cell = std::optional<std::string>;

/// A numeric-parsing column with at most this many distinct values is categorical.
inline constexpr std::size_t kCategoricalCutoff = 10;
inline constexpr std::size_t kDistributionBins = 20;

enum class ColumnType { Numerical, CategoricalBinary, CategoricalMulti };

std::string_view type_name(ColumnType type);
inline bool is_categorical(ColumnType type) { return type != ColumnType::Numerical; }

/// Explicit override applied at load time. Categorical still resolves to
/// binary or multi from the distinct count.
enum class TypeHint { Numerical, Categorical };
std::optional<TypeHint> parse_type_hint(std::string_view text);

/// Empty string and `NA` denote a missing cell.
bool is_missing_token(std::string_view raw);
/// Parses a finite real; surrounding ASCII whitespace is ignored.
std::optional<double> parse_number(std::string_view text);

ColumnType infer_column_type(std::span<const Cell> values);

class Column {
 public:
  Column(std::string name, std::vector<Cell> cells, std::optional<TypeHint> hint = std::nullopt);

  const std::string& name() const { return name_; }
  ColumnType type() const { return type_; }
  bool categorical() const { return is_categorical(type_); }
  /// True when every non-missing cell parses as a finite real (and one exists).
  bool numeric_coded() const { return numeric_coded_; }

  std::size_t size() const { return cells_.size(); }
  std::size_t missing_count() const { return missing_count_; }
  bool missing(RowIndex row) const { return !cells_[row].has_value(); }
  const Cell& cell(RowIndex row) const { return cells_[row]; }

  /// NaN when missing or the column is not numeric-coded.
  double number(RowIndex row) const { return numbers_.empty() ? kNaN : numbers_[row]; }
  /// Category code for categorical columns, -1 when missing.
  std::int32_t code(RowIndex row) const { return codes_.empty() ? -1 : codes_[row]; }
  /// Observed categories in display order: numeric labels by value, others lexicographic.
  const std::vector<std::string>& categories() const { return categories_; }
  std::optional<std::int32_t> code_of(std::string_view label) const;

  /// Full-column range of numeric values; only meaningful when numeric_coded().
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::string name_;
  std::vector<Cell> cells_;
  ColumnType type_ = ColumnType::CategoricalMulti;
  bool numeric_coded_ = false;
  std::size_t missing_count_ = 0;
  std::vector<double> numbers_;
  std::vector<std::int32_t> codes_;
  std::vector<std::string> categories_;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// Immutable typed columnar table. Safe to share across readers.
class Dataset {
 public:
  Dataset(std::string name, std::vector<Column> columns);

  const std::string& name() const { return name_; }
  std::size_t row_count() const { return rows_; }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t index) const { return columns_.at(index); }
  /// Throws Error(UnknownColumn).
  const Column& column(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t rows_ = 0;
};

struct LoadOptions {
  std::map<std::string, TypeHint, std::less<>> type_hints;
};

Dataset load_csv(std::string_view text, std::string name, const LoadOptions& options = {});
/// Dataset name is the file stem.
Dataset load_csv_file(const std::filesystem::path& path, const LoadOptions& options = {});
/// Writes the header and cells back; missing cells are written empty.
std::string to_csv(const Dataset& dataset);

struct CategoryCount {
  std::string category;
  std::size_t count = 0;
  double fraction = 0.0;
};

struct NumericBins {
  std::vector<double> edges;  // kDistributionBins + 1, strictly increasing
  std::vector<std::size_t> counts;
  std::vector<double> fractions;
  double min = 0.0;  // over the summarized rows
  double max = 0.0;
  double mean = 0.0;
};

struct DistributionSummary {
  std::string column;
  ColumnType type = ColumnType::Numerical;
  std::size_t observed = 0;  // non-missing cells in the subset
  std::size_t missing = 0;
  std::vector<CategoryCount> categories;  // categorical columns
  std::optional<NumericBins> bins;        // numerical columns
};

/// Equal-width bin edges over the full-column range. A constant column gets a
/// unit-width range centred on its value.
std::vector<double> shared_bin_edges(const Column& column);
std::size_t bin_index(std::span<const double> edges, double value);

DistributionSummary column_distribution(const Dataset& dataset, std::string_view column,
                                        std::optional<std::span<const RowIndex>> subset = std::nullopt);

}  // namespace cfx
