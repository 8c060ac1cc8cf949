#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfx/dataset.hpp"

namespace cfx {

/// Inclusive on both ends. Infinite bounds express open-ended ranges.
struct NumericRange {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const NumericRange&) const = default;
};

/// Sorted, duplicate-free category labels.
struct CategorySet {
  std::vector<std::string> values;
  bool operator==(const CategorySet&) const = default;
};

struct FilterConstraint {
  std::string column;
  std::variant<NumericRange, CategorySet> predicate;

  bool operator==(const FilterConstraint&) const = default;

  static FilterConstraint range(std::string column, double lo, double hi);
  static FilterConstraint categories(std::string column, std::vector<std::string> values);
};

/// Parses `col:lo..hi` (either bound may be empty for an open end) or
/// `col=v1|v2`. Throws Error(BadConstraint).
FilterConstraint parse_constraint(std::string_view text);
/// Inverse of parse_constraint; numbers use the shortest round-trip form.
std::string to_string(const FilterConstraint& constraint);

/// Checks the constraint against the dataset schema. Throws UnknownColumn,
/// OutcomeConstraint, InvalidRange, TypeMismatch or UnknownCategory.
void validate(const Dataset& dataset, const FilterConstraint& constraint,
              std::optional<std::string_view> outcome = std::nullopt);

/// Missing cells never match.
bool matches(const Dataset& dataset, RowIndex row, const FilterConstraint& constraint);

/// Conjunctive stack with at most one constraint per column.
class FilterStack {
 public:
  FilterStack() = default;
  explicit FilterStack(std::vector<FilterConstraint> constraints);

  /// Replaces an existing constraint on the same column in place, else appends.
  void push(FilterConstraint constraint);
  /// Returns false when the column has no constraint.
  bool remove(std::string_view column);
  const FilterConstraint* find(std::string_view column) const;

  const std::vector<FilterConstraint>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }

  bool operator==(const FilterStack&) const = default;

 private:
  std::vector<FilterConstraint> constraints_;
};

/// Rows matching every constraint, ascending. Empty stack selects all rows.
RowSet included_mask(const Dataset& dataset, const FilterStack& stack);

}  // namespace cfx
