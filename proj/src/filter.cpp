#include "cfx/filter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "cfx/error.hpp"

namespace cfx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Empty text is an open bound; anything else must be a finite number.
std::optional<double> parse_bound(std::string_view text, double open) {
  text = trim(text);
  if (text.empty()) return open;
  return parse_number(text);
}

std::optional<FilterConstraint> parse_range(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const std::string_view rhs = text.substr(colon + 1);
  const auto dots = rhs.find("..");
  if (dots == std::string_view::npos) return std::nullopt;
  auto lo = parse_bound(rhs.substr(0, dots), -kInf);
  auto hi = parse_bound(rhs.substr(dots + 2), kInf);
  if (!lo || !hi) return std::nullopt;
  return FilterConstraint::range(std::string(text.substr(0, colon)), *lo, *hi);
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

FilterConstraint FilterConstraint::range(std::string column, double lo, double hi) {
  return FilterConstraint{std::move(column), NumericRange{lo, hi}};
}

FilterConstraint FilterConstraint::categories(std::string column, std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return FilterConstraint{std::move(column), CategorySet{std::move(values)}};
}

FilterConstraint parse_constraint(std::string_view text) {
  if (auto range = parse_range(text)) return *range;

  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::BadConstraint,
                "cannot parse constraint '" + std::string(text) + "' (expected col:lo..hi or col=a|b)");
  }
  std::vector<std::string> values;
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto bar = rest.find('|');
    std::string_view value = rest.substr(0, bar);
    if (value.empty()) throw Error(ErrorCode::BadConstraint, "empty category in '" + std::string(text) + "'");
    values.emplace_back(value);
    if (bar == std::string_view::npos) break;
    rest.remove_prefix(bar + 1);
  }
  return FilterConstraint::categories(std::string(text.substr(0, eq)), std::move(values));
}

std::string to_string(const FilterConstraint& c) {
  if (const auto* r = std::get_if<NumericRange>(&c.predicate)) {
    std::string out = c.column + ":";
    if (std::isfinite(r->lo)) out += format_number(r->lo);
    out += "..";
    if (std::isfinite(r->hi)) out += format_number(r->hi);
    return out;
  }
  const auto& set = std::get<CategorySet>(c.predicate);
  std::string out = c.column + "=";
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    if (i) out += '|';
    out += set.values[i];
  }
  return out;
}

void validate(const Dataset& dataset, const FilterConstraint& c, std::optional<std::string_view> outcome) {
  const Column& col = dataset.column(c.column);
  if (outcome && c.column == *outcome) {
    throw Error(ErrorCode::OutcomeConstraint, "cannot filter on the outcome column '" + c.column + "'");
  }
  if (const auto* r = std::get_if<NumericRange>(&c.predicate)) {
    if (std::isnan(r->lo) || std::isnan(r->hi) || r->lo > r->hi) {
      throw Error(ErrorCode::InvalidRange, "range lower bound exceeds upper bound in '" + to_string(c) + "'");
    }
    // Numeric-coded categorical columns (decile scores, 0/1 flags) accept ranges too.
    if (!col.numeric_coded()) {
      throw Error(ErrorCode::TypeMismatch, "column '" + c.column + "' is not numeric");
    }
    return;
  }
  const auto& set = std::get<CategorySet>(c.predicate);
  if (!col.categorical()) {
    throw Error(ErrorCode::TypeMismatch, "column '" + c.column + "' is numerical; use a range");
  }
  if (set.values.empty()) throw Error(ErrorCode::BadConstraint, "empty category set");
  for (const auto& v : set.values) {
    if (!col.code_of(v)) {
      throw Error(ErrorCode::UnknownCategory, "column '" + c.column + "' has no category '" + v + "'");
    }
  }
}

namespace {

bool cell_matches(const Column& col, RowIndex row, const FilterConstraint& c) {
  if (col.missing(row)) return false;
  if (const auto* r = std::get_if<NumericRange>(&c.predicate)) {
    const double v = col.number(row);
    return v >= r->lo && v <= r->hi;
  }
  const auto& values = std::get<CategorySet>(c.predicate).values;
  return std::binary_search(values.begin(), values.end(), *col.cell(row));
}

}  // namespace

bool matches(const Dataset& dataset, RowIndex row, const FilterConstraint& c) {
  return cell_matches(dataset.column(c.column), row, c);
}

FilterStack::FilterStack(std::vector<FilterConstraint> constraints) {
  for (auto& c : constraints) push(std::move(c));
}

void FilterStack::push(FilterConstraint constraint) {
  for (auto& existing : constraints_) {
    if (existing.column == constraint.column) {
      existing = std::move(constraint);
      return;
    }
  }
  constraints_.push_back(std::move(constraint));
}

bool FilterStack::remove(std::string_view column) {
  auto it = std::find_if(constraints_.begin(), constraints_.end(),
                         [&](const FilterConstraint& c) { return c.column == column; });
  if (it == constraints_.end()) return false;
  constraints_.erase(it);
  return true;
}

const FilterConstraint* FilterStack::find(std::string_view column) const {
  for (const auto& c : constraints_) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

RowSet included_mask(const Dataset& dataset, const FilterStack& stack) {
  std::vector<const Column*> columns;
  for (const auto& c : stack.constraints()) columns.push_back(&dataset.column(c.column));
  RowSet rows;
  for (RowIndex r = 0; r < dataset.row_count(); ++r) {
    bool keep = true;
    for (std::size_t i = 0; i < columns.size() && keep; ++i) {
      keep = cell_matches(*columns[i], r, stack.constraints()[i]);
    }
    if (keep) rows.push_back(r);
  }
  return rows;
}

}  // namespace cfx
