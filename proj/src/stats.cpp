#include "cfx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cfx/error.hpp"

namespace cfx {

namespace {

double check_distribution(const CategoricalDistribution& p, const char* which) {
  double sum = 0.0;
  for (const auto& [label, mass] : p) {
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
      throw Error(ErrorCode::NotADistribution, std::string(which) + " has invalid mass for '" + label + "'");
    }
    sum += mass;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::NotADistribution, std::string(which) + " sums to " + std::to_string(sum));
  }
  return sum;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool constant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

// Maps arbitrary codes onto 0..k-1 in first-seen order.
std::vector<std::size_t> compact(std::span<const std::int32_t> codes, std::size_t& levels) {
  std::map<std::int32_t, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(codes.size());
  for (auto c : codes) out.push_back(ids.emplace(c, ids.size()).first->second);
  levels = ids.size();
  return out;
}

}  // namespace

double hellinger(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  const double p_total = check_distribution(p, "first distribution");
  const double q_total = check_distribution(q, "second distribution");
  // 1 - sum sqrt(p q) == 0.5 * sum (sqrt p - sqrt q)^2 for normalized inputs;
  // the second form avoids cancellation when p and q are close.
  double squared = 0.0;
  auto pi = p.begin();
  auto qi = q.begin();
  while (pi != p.end() || qi != q.end()) {
    double a = 0.0;
    double b = 0.0;
    if (qi == q.end() || (pi != p.end() && pi->first < qi->first)) {
      a = (pi++)->second;
    } else if (pi == p.end() || qi->first < pi->first) {
      b = (qi++)->second;
    } else {
      a = (pi++)->second;
      b = (qi++)->second;
    }
    const double gap = std::sqrt(a / p_total) - std::sqrt(b / q_total);
    squared += gap * gap;
  }
  return clamp01(std::sqrt(0.5 * squared));
}

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorCode::EmptySample, "KS statistic needs two nonempty samples");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Once either sample is exhausted the gap can only shrink.
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return clamp01(d);
}

std::string_view measure_name(DivergenceMeasure measure) {
  return measure == DivergenceMeasure::Hellinger ? "hellinger" : "kolmogorov_smirnov";
}

std::string_view strength_name(Strength strength) {
  switch (strength) {
    case Strength::Weak: return "weak";
    case Strength::Moderate: return "moderate";
    case Strength::Strong: return "strong";
  }
  return "unknown";
}

Strength classify_strength(double d) {
  if (!(d >= 0.0 && d <= 1.0)) throw Error(ErrorCode::OutOfRange, "difference must lie in [0, 1]");
  if (d <= kWeakUpperBound) return Strength::Weak;
  if (d < kStrongLowerBound) return Strength::Moderate;
  return Strength::Strong;
}

std::string_view subset_name(SubsetKind kind) {
  switch (kind) {
    case SubsetKind::In: return "IN";
    case SubsetKind::Counterfactual: return "CF";
    case SubsetKind::Excluded: return "EX";
    case SubsetKind::ExcludedControl: return "EX_control";
  }
  return "unknown";
}

const SubsetOutcome* OutcomeDistribution::find(SubsetKind kind) const {
  for (const auto& s : subsets) {
    if (s.subset == kind) return &s;
  }
  return nullptr;
}

SubsetOutcome subset_outcome(const Dataset& dataset, std::string_view outcome, std::span<const RowIndex> rows,
                             SubsetKind kind) {
  SubsetOutcome out;
  out.subset = kind;
  out.summary = column_distribution(dataset, outcome, rows);
  const Column& col = dataset.column(outcome);
  if (!col.categorical()) {
    for (RowIndex r : rows) {
      if (!col.missing(r)) out.sample.push_back(col.number(r));
    }
    std::sort(out.sample.begin(), out.sample.end());
  }
  return out;
}

CategoricalDistribution probabilities(const DistributionSummary& summary) {
  CategoricalDistribution p;
  for (const auto& c : summary.categories) p.emplace(c.category, c.fraction);
  return p;
}

std::pair<double, DivergenceMeasure> in_cf_difference(const OutcomeDistribution& distribution) {
  const SubsetOutcome* in = distribution.find(SubsetKind::In);
  const SubsetOutcome* cf = distribution.find(SubsetKind::Counterfactual);
  if (!in || !cf) throw Error(ErrorCode::EmptySubset, "IN and CF outcome distributions are both required");
  if (is_categorical(distribution.type)) {
    return {hellinger(probabilities(in->summary), probabilities(cf->summary)), DivergenceMeasure::Hellinger};
  }
  return {ks_statistic(in->sample, cf->sample), DivergenceMeasure::KolmogorovSmirnov};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::TooFewRows, "Pearson needs two paired values");
  if (constant(x) || constant(y)) return 0.0;
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double regression_r2(std::span<const std::int32_t> groups, std::span<const double> y) {
  if (groups.size() != y.size() || y.size() < 2) throw Error(ErrorCode::TooFewRows, "R^2 needs two paired values");
  if (constant(y)) return 0.0;
  std::size_t levels = 0;
  const auto g = compact(groups, levels);
  if (levels < 2) return 0.0;

  std::vector<double> sum(levels, 0.0);
  std::vector<std::size_t> count(levels, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum[g[i]] += y[i];
    ++count[g[i]];
    total += y[i];
  }
  const double mean = total / static_cast<double>(y.size());
  double ss_total = 0.0;
  double ss_within = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double group_mean = sum[g[i]] / static_cast<double>(count[g[i]]);
    ss_total += (y[i] - mean) * (y[i] - mean);
    ss_within += (y[i] - group_mean) * (y[i] - group_mean);
  }
  return clamp01(1.0 - ss_within / ss_total);
}

double cramers_v(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::TooFewRows, "Cramer's V needs two paired values");
  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto ra = compact(a, rows);
  const auto cb = compact(b, cols);
  if (std::min(rows, cols) < 2) return 0.0;

  std::vector<double> table(rows * cols, 0.0);
  std::vector<double> row_total(rows, 0.0);
  std::vector<double> col_total(cols, 0.0);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    table[ra[i] * cols + cb[i]] += 1.0;
    row_total[ra[i]] += 1.0;
    col_total[cb[i]] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double chi2 = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_total[r] * col_total[c] / n;
      const double gap = table[r * cols + c] - expected;
      chi2 += gap * gap / expected;
    }
  }
  return clamp01(std::sqrt(chi2 / (n * static_cast<double>(std::min(rows, cols) - 1))));
}

std::string_view method_name(AssociationMethod method) {
  switch (method) {
    case AssociationMethod::Pearson: return "pearson";
    case AssociationMethod::RegressionR2: return "regression_r2";
    case AssociationMethod::CramersV: return "cramers_v";
  }
  return "unknown";
}

AssociationMethod association_method(ColumnType feature, ColumnType outcome) {
  const bool fc = is_categorical(feature);
  const bool oc = is_categorical(outcome);
  if (!fc && !oc) return AssociationMethod::Pearson;
  if (fc && oc) return AssociationMethod::CramersV;
  return AssociationMethod::RegressionR2;
}

AssociationRecord association(const Dataset& dataset, std::string_view feature, std::string_view outcome,
                              std::span<const RowIndex> subset, SubsetKind scope) {
  const Column& f = dataset.column(feature);
  const Column& o = dataset.column(outcome);
  AssociationRecord record;
  record.feature = f.name();
  record.scope = scope;
  record.method = association_method(f.type(), o.type());

  RowSet rows;
  for (RowIndex r : subset) {
    if (r >= dataset.row_count()) throw Error(ErrorCode::RowOutOfRange, "row " + std::to_string(r) + " out of range");
    if (!f.missing(r) && !o.missing(r)) rows.push_back(r);
  }
  record.rows_used = rows.size();
  if (rows.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "association of '" + f.name() + "' needs at least two complete rows");
  }

  auto numbers = [&](const Column& c) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (RowIndex r : rows) v.push_back(c.number(r));
    return v;
  };
  auto codes = [&](const Column& c) {
    std::vector<std::int32_t> v;
    v.reserve(rows.size());
    for (RowIndex r : rows) v.push_back(c.code(r));
    return v;
  };

  switch (record.method) {
    case AssociationMethod::Pearson:
      record.value = pearson(numbers(f), numbers(o));
      break;
    case AssociationMethod::CramersV:
      record.value = cramers_v(codes(f), codes(o));
      break;
    case AssociationMethod::RegressionR2:
      record.value = f.categorical() ? regression_r2(codes(f), numbers(o)) : regression_r2(codes(o), numbers(f));
      break;
  }
  return record;
}

std::vector<AssociationRecord> sort_associations(std::vector<AssociationRecord> records, SortOrder order,
                                                 bool by_magnitude) {
  auto key = [by_magnitude](const AssociationRecord& r) { return by_magnitude ? std::abs(*r.value) : *r.value; };
  std::stable_sort(records.begin(), records.end(), [&](const AssociationRecord& a, const AssociationRecord& b) {
    if (!a.value || !b.value) return a.value.has_value() && !b.value.has_value();
    return order == SortOrder::Ascending ? key(a) < key(b) : key(a) > key(b);
  });
  return records;
}

}  // namespace cfx
