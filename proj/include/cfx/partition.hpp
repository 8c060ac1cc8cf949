#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/dataset.hpp"
#include "cfx/filter.hpp"

namespace cfx {

struct SimilarityConfig {
  /// Explicit feature list; nullopt means every column.
  std::optional<std::vector<std::string>> features;
  bool exclude_filtered = true;
  bool exclude_outcome = true;
  double cf_fraction = 0.5;
  /// Included rows compared against per non-matching row; 0 means unlimited.
  std::size_t in_sample_cap = 1000;
  std::uint64_t seed = 0;

  bool operator==(const SimilarityConfig&) const = default;
};

/// Throws Error(InvalidConfig) unless 0 < cf_fraction < 1.
void validate(const SimilarityConfig& config);

/// Column indices used for similarity, in dataset order.
std::vector<std::size_t> similarity_features(const Dataset& dataset, const FilterStack& stack,
                                             const SimilarityConfig& config,
                                             std::optional<std::string_view> outcome);

/// Row-major view of the similarity features: numerical features min-max
/// scaled over the full dataset, categorical features as category codes.
class FeatureSpace {
 public:
  FeatureSpace(const Dataset& dataset, std::span<const std::size_t> feature_columns);

  std::size_t feature_count() const { return categorical_.size(); }
  std::size_t row_count() const { return rows_; }

  /// sqrt(sum of squared per-feature gaps / usable features). A feature is
  /// unusable for the pair when either cell is missing; nullopt when none are usable.
  std::optional<double> distance(RowIndex a, RowIndex b) const;

 private:
  std::size_t rows_ = 0;
  std::vector<bool> categorical_;
  std::vector<double> values_;  // rows_ x feature_count(), NaN for missing
};

/// Throws Error(NoUsableFeatures).
double normalized_distance(const FeatureSpace& space, RowIndex a, RowIndex b);

/// Uniform sample without replacement of at most `cap` rows (0 = all),
/// returned ascending. Deterministic for a given seed.
RowSet sample_included(std::span<const RowIndex> in_rows, std::size_t cap, std::uint64_t seed);

/// Mean normalized distance from `row` to each included row. Pairs with no
/// usable feature are skipped. Throws EmptyIncluded or NoUsableFeatures.
double mean_distance_to_included(const FeatureSpace& space, RowIndex row, std::span<const RowIndex> in_rows);

struct SubsetPartition {
  RowSet in_rows;  // ascending
  /// CF and EX rows in rank order: ascending mean distance, ties by row index.
  RowSet cf_rows;
  RowSet ex_rows;
  std::vector<double> cf_distance;  // parallel to cf_rows
  std::vector<double> ex_distance;  // parallel to ex_rows
  std::vector<std::string> features;
  SimilarityConfig config;

  std::size_t row_count() const { return in_rows.size() + cf_rows.size() + ex_rows.size(); }
  /// Complement of IN in ascending order.
  RowSet complement() const;

  bool operator==(const SubsetPartition&) const = default;
};

/// Number of counterfactual rows for `nonmatching` candidates: ceil(fraction * m).
std::size_t counterfactual_size(double cf_fraction, std::size_t nonmatching);

/// Splits the rows that fail the stack into CF (most similar to IN) and EX.
/// A row whose every pair with IN lacks usable features is ranked at distance 1.
/// Throws EmptyIncluded, EmptyComplement, NoUsableFeatures, InvalidConfig.
SubsetPartition partition(const Dataset& dataset, const FilterStack& stack, const SimilarityConfig& config,
                          std::optional<std::string_view> outcome = std::nullopt);

}  // namespace cfx
