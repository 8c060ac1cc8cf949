#include "cfx/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "cfx/error.hpp"

namespace cfx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean distance, or nullopt when no included row shares a usable feature.
std::optional<double> try_mean_distance(const FeatureSpace& space, RowIndex row, std::span<const RowIndex> in_rows) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (RowIndex a : in_rows) {
    if (auto d = space.distance(row, a)) {
      sum += *d;
      ++pairs;
    }
  }
  if (pairs == 0) return std::nullopt;
  return sum / static_cast<double>(pairs);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t work_per_item, Fn&& fn) {
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count * work_per_item < 200'000) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t start = 0; start < count; start += chunk) {
    pool.emplace_back([&, start] {
      for (std::size_t i = start; i < std::min(count, start + chunk); ++i) fn(i);
    });
  }
}

}  // namespace

void validate(const SimilarityConfig& config) {
  if (!(config.cf_fraction > 0.0 && config.cf_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "cf_fraction must lie strictly between 0 and 1");
  }
}

std::vector<std::size_t> similarity_features(const Dataset& dataset, const FilterStack& stack,
                                             const SimilarityConfig& config,
                                             std::optional<std::string_view> outcome) {
  std::vector<bool> chosen(dataset.column_count(), !config.features.has_value());
  if (config.features) {
    for (const auto& name : *config.features) {
      dataset.column(name);
      chosen[*dataset.find(name)] = true;
    }
  }
  if (config.exclude_filtered) {
    for (const auto& c : stack.constraints()) {
      if (auto i = dataset.find(c.column)) chosen[*i] = false;
    }
  }
  if (config.exclude_outcome && outcome) {
    if (auto i = dataset.find(*outcome)) chosen[*i] = false;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i]) out.push_back(i);
  }
  return out;
}

FeatureSpace::FeatureSpace(const Dataset& dataset, std::span<const std::size_t> feature_columns)
    : rows_(dataset.row_count()) {
  const std::size_t f = feature_columns.size();
  values_.assign(rows_ * f, kNaN);
  for (std::size_t j = 0; j < f; ++j) {
    const Column& col = dataset.column(feature_columns[j]);
    categorical_.push_back(col.categorical());
    const double lo = col.min();
    const double span = col.max() - col.min();
    for (RowIndex r = 0; r < rows_; ++r) {
      if (col.missing(r)) continue;
      double v;
      if (col.categorical()) {
        v = static_cast<double>(col.code(r));
      } else {
        v = span > 0.0 ? (col.number(r) - lo) / span : 0.0;
      }
      values_[r * f + j] = v;
    }
  }
}

std::optional<double> FeatureSpace::distance(RowIndex a, RowIndex b) const {
  const std::size_t f = feature_count();
  const double* x = values_.data() + a * f;
  const double* y = values_.data() + b * f;
  double sum = 0.0;
  std::size_t usable = 0;
  for (std::size_t j = 0; j < f; ++j) {
    if (std::isnan(x[j]) || std::isnan(y[j])) continue;
    ++usable;
    if (categorical_[j]) {
      sum += x[j] == y[j] ? 0.0 : 1.0;
    } else {
      const double gap = x[j] - y[j];
      sum += gap * gap;
    }
  }
  if (usable == 0) return std::nullopt;
  return std::min(1.0, std::sqrt(sum / static_cast<double>(usable)));
}

double normalized_distance(const FeatureSpace& space, RowIndex a, RowIndex b) {
  if (auto d = space.distance(a, b)) return *d;
  throw Error(ErrorCode::NoUsableFeatures,
              "rows " + std::to_string(a) + " and " + std::to_string(b) + " share no usable feature");
}

RowSet sample_included(std::span<const RowIndex> in_rows, std::size_t cap, std::uint64_t seed) {
  RowSet rows(in_rows.begin(), in_rows.end());
  if (cap == 0 || rows.size() <= cap) return rows;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(cap);
  std::sort(rows.begin(), rows.end());
  return rows;
}

double mean_distance_to_included(const FeatureSpace& space, RowIndex row, std::span<const RowIndex> in_rows) {
  if (in_rows.empty()) throw Error(ErrorCode::EmptyIncluded, "included subset is empty");
  if (auto d = try_mean_distance(space, row, in_rows)) return *d;
  throw Error(ErrorCode::NoUsableFeatures,
              "row " + std::to_string(row) + " shares no usable feature with the included subset");
}

RowSet SubsetPartition::complement() const {
  RowSet out(cf_rows);
  out.insert(out.end(), ex_rows.begin(), ex_rows.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t counterfactual_size(double cf_fraction, std::size_t nonmatching) {
  // The small slack keeps exact products such as 0.1 * 30 from rounding up.
  const double target = cf_fraction * static_cast<double>(nonmatching);
  const auto k = static_cast<std::size_t>(std::ceil(target - 1e-9));
  return std::min(k, nonmatching);
}

SubsetPartition partition(const Dataset& dataset, const FilterStack& stack, const SimilarityConfig& config,
                          std::optional<std::string_view> outcome) {
  validate(config);
  SubsetPartition result;
  result.config = config;
  result.in_rows = included_mask(dataset, stack);
  if (result.in_rows.empty()) throw Error(ErrorCode::EmptyIncluded, "the filter matches no rows");
  if (result.in_rows.size() == dataset.row_count()) {
    throw Error(ErrorCode::EmptyComplement, "the filter matches every row");
  }

  const auto columns = similarity_features(dataset, stack, config, outcome);
  if (columns.empty()) throw Error(ErrorCode::NoUsableFeatures, "no similarity features remain");
  for (std::size_t c : columns) result.features.push_back(dataset.column(c).name());

  const FeatureSpace space(dataset, columns);
  const RowSet reference = sample_included(result.in_rows, config.in_sample_cap, config.seed);

  RowSet others;
  others.reserve(dataset.row_count() - result.in_rows.size());
  std::size_t next_in = 0;
  for (RowIndex r = 0; r < dataset.row_count(); ++r) {
    if (next_in < result.in_rows.size() && result.in_rows[next_in] == r) {
      ++next_in;
    } else {
      others.push_back(r);
    }
  }

  std::vector<double> distance(others.size());
  parallel_for(others.size(), reference.size() * columns.size(), [&](std::size_t i) {
    distance[i] = try_mean_distance(space, others[i], reference).value_or(1.0);
  });

  std::vector<std::size_t> order(others.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distance[a] != distance[b]) return distance[a] < distance[b];
    return others[a] < others[b];
  });

  const std::size_t k = counterfactual_size(config.cf_fraction, others.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    if (rank < k) {
      result.cf_rows.push_back(others[i]);
      result.cf_distance.push_back(distance[i]);
    } else {
      result.ex_rows.push_back(others[i]);
      result.ex_distance.push_back(distance[i]);
    }
  }
  return result;
}

}  // namespace cfx
