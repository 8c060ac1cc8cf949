#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfx/dataset.hpp"

namespace cfx {

// Divergence -----------------------------------------------------------------

/// Category label -> probability. Labels absent from one side count as 0.
using CategoricalDistribution = std::map<std::string, double, std::less<>>;

/// sqrt(1 - sum_i sqrt(p_i q_i)) over the union of categories, in [0, 1].
/// Throws Error(NotADistribution) on negative mass or a sum outside 1 +/- 1e-6.
double hellinger(const CategoricalDistribution& p, const CategoricalDistribution& q);

/// Exact two-sample Kolmogorov-Smirnov statistic sup_t |F_x(t) - F_y(t)|.
/// Throws Error(EmptySample).
double ks_statistic(std::span<const double> x, std::span<const double> y);

enum class DivergenceMeasure { Hellinger, KolmogorovSmirnov };
std::string_view measure_name(DivergenceMeasure measure);

// Filter strength --------------------------------------------------------------

enum class Strength { Weak, Moderate, Strong };
std::string_view strength_name(Strength strength);

inline constexpr double kWeakUpperBound = 0.40;
inline constexpr double kStrongLowerBound = 0.60;

/// Weak for d <= 0.40, Strong for d >= 0.60, Moderate in between.
/// Throws Error(OutOfRange) outside [0, 1].
Strength classify_strength(double d);

// Subsets and outcome distributions ------------------------------------------------

enum class SubsetKind { In, Counterfactual, Excluded, ExcludedControl };
std::string_view subset_name(SubsetKind kind);

struct SubsetOutcome {
  SubsetKind subset = SubsetKind::In;
  DistributionSummary summary;
  std::vector<double> sample;  // numerical outcomes: non-missing values, ascending
};

struct OutcomeDistribution {
  std::string outcome;
  ColumnType type = ColumnType::CategoricalBinary;
  std::vector<SubsetOutcome> subsets;  // only nonempty subsets appear

  const SubsetOutcome* find(SubsetKind kind) const;
};

/// Throws EmptySubset when no row of the subset has an outcome value.
SubsetOutcome subset_outcome(const Dataset& dataset, std::string_view outcome, std::span<const RowIndex> rows,
                             SubsetKind kind);
CategoricalDistribution probabilities(const DistributionSummary& summary);

/// Hellinger for categorical outcomes, KS on the raw samples for numerical ones.
/// Throws Error(EmptySubset) when IN or CF is absent.
std::pair<double, DivergenceMeasure> in_cf_difference(const OutcomeDistribution& distribution);

struct FilterStrengthReport {
  double d = 0.0;
  DivergenceMeasure measure = DivergenceMeasure::Hellinger;
  Strength strength = Strength::Weak;
  std::size_t in_size = 0;
  std::size_t cf_size = 0;
  std::size_t ex_size = 0;
};

// Association ----------------------------------------------------------------

/// Pearson r in [-1, 1]; 0 when either variable is constant.
double pearson(std::span<const double> x, std::span<const double> y);
/// R^2 of regressing y on one-hot indicators of `groups`, i.e. between-group
/// over total sum of squares. 0 for constant y or a single group.
double regression_r2(std::span<const std::int32_t> groups, std::span<const double> y);
/// Cramer's V from the uncorrected chi-squared statistic over observed categories.
double cramers_v(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

enum class AssociationMethod { Pearson, RegressionR2, CramersV };
std::string_view method_name(AssociationMethod method);
AssociationMethod association_method(ColumnType feature, ColumnType outcome);

struct AssociationRecord {
  std::string feature;
  std::optional<double> value;  // nullopt when the subset has too few usable rows
  AssociationMethod method = AssociationMethod::Pearson;
  SubsetKind scope = SubsetKind::In;
  std::size_t rows_used = 0;
};

/// Uses rows of `subset` where both cells are present. Throws TooFewRows (< 2
/// such rows) or UnknownColumn.
AssociationRecord association(const Dataset& dataset, std::string_view feature, std::string_view outcome,
                              std::span<const RowIndex> subset, SubsetKind scope = SubsetKind::In);

enum class SortOrder { Ascending, Descending };
/// Stable; records without a value go last.
std::vector<AssociationRecord> sort_associations(std::vector<AssociationRecord> records, SortOrder order,
                                                 bool by_magnitude);

}  // namespace cfx
