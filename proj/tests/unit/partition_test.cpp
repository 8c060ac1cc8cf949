#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "cfx/error.hpp"
#include "cfx/partition.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cfx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::MalformedRequest;
}

std::vector<std::size_t> all_columns(const Dataset& ds) {
  std::vector<std::size_t> out(ds.column_count());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

Dataset numeric(std::vector<std::pair<std::string, std::vector<std::string>>> cols) {
  std::string text;
  std::vector<std::string> header;
  for (const auto& [name, values] : cols) header.push_back(name);
  csv::append_record(text, header);
  for (std::size_t r = 0; r < cols[0].second.size(); ++r) {
    std::vector<std::string> rec;
    for (const auto& [name, values] : cols) rec.push_back(values[r]);
    csv::append_record(text, rec);
  }
  LoadOptions opts;
  for (const auto& [name, values] : cols)
    if (name[0] == 'x') opts.type_hints[name] = TypeHint::Numerical;
  return load_csv(text, "n", opts);
}

RowSet sorted(RowSet rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

TEST_SUITE("distance") {
  TEST_CASE("identity, extremes and one of two features apart") {
    const auto ds = numeric({{"x1", {"0", "1", "0"}}, {"x2", {"0", "1", "1"}}, {"k", {"a", "b", "a"}}});
    const FeatureSpace space(ds, all_columns(ds));
    CHECK(normalized_distance(space, 0, 0) == 0.0);
    CHECK(normalized_distance(space, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<std::size_t> two{0, 1};
    const FeatureSpace pair(ds, two);
    CHECK(normalized_distance(pair, 0, 2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(normalized_distance(pair, 0, 2) == doctest::Approx(0.7071).epsilon(1e-4));
  }

  TEST_CASE("categorical features: equal is 0, different is 1") {
    const auto ds = fixture::table({{"k", {"a", "a", "b"}}});
    const FeatureSpace space(ds, all_columns(ds));
    CHECK(normalized_distance(space, 0, 1) == 0.0);
    CHECK(normalized_distance(space, 0, 2) == 1.0);
  }

  TEST_CASE("missing cells drop the feature for that pair") {
    const auto ds = numeric({{"x1", {"0", "NA", "1"}}, {"k", {"a", "b", "b"}}});
    const FeatureSpace space(ds, all_columns(ds));
    CHECK(normalized_distance(space, 0, 1) == 1.0);
    CHECK(normalized_distance(space, 1, 2) == 0.0);
    const auto only = numeric({{"x1", {"0", "NA", "1"}}});
    const FeatureSpace sparse(only, all_columns(only));
    CHECK(code_of([&] { normalized_distance(sparse, 0, 1); }) == ErrorCode::NoUsableFeatures);
  }

  TEST_CASE("mean distance to included rows") {
    const auto ds = numeric({{"x1", {"0", "0", "0.2", "0.6", "0.4", "1"}}});
    const FeatureSpace space(ds, all_columns(ds));
    const RowSet same{0, 1};
    CHECK(mean_distance_to_included(space, 0, same) == 0.0);
    const RowSet single{4};
    CHECK(mean_distance_to_included(space, 0, single) == doctest::Approx(0.4).epsilon(1e-15));
    const RowSet two{2, 3};
    CHECK(mean_distance_to_included(space, 0, two) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(code_of([&] { mean_distance_to_included(space, 0, RowSet{}); }) == ErrorCode::EmptyIncluded);
  }

  TEST_CASE("random pairs match the oracle") {
    fixture::Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const auto ds = load_csv(fixture::random_csv(rng, 2, 40, 1, 8), "r");
      const FeatureSpace space(ds, all_columns(ds));
      std::vector<std::string> names;
      for (const auto& c : ds.columns()) names.push_back(c.name());
      const auto ranges = oracle::numeric_ranges(ds);
      for (int k = 0; k < 20; ++k) {
        const auto a = fixture::pick(rng, ds.row_count());
        const auto b = fixture::pick(rng, ds.row_count());
        const auto got = space.distance(a, b);
        const auto want = oracle::distance(ds, ranges, names, a, b);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
          CHECK(std::fabs(*got - static_cast<double>(*want)) < 1e-12);
          CHECK(*got >= 0.0);
          CHECK(*got <= 1.0);
        }
      }
    }
  }
}

TEST_SUITE("partition") {
  TEST_CASE("closest half goes to CF") {
    const auto ds = numeric({{"g", {"in", "out", "out", "out", "out"}}, {"x", {"0", "0.1", "0.9", "0.2", "0.8"}}});
    const auto p = partition(ds, FilterStack({parse_constraint("g=in")}), {});
    CHECK(p.in_rows == RowSet{0});
    CHECK(p.cf_rows == RowSet{1, 3});
    CHECK(p.ex_rows == RowSet{4, 2});
    CHECK(p.cf_distance[0] == doctest::Approx(0.1 / 0.9).epsilon(1e-15));
    CHECK(p.cf_distance[1] == doctest::Approx(0.2 / 0.9).epsilon(1e-15));
    CHECK(p.features == std::vector<std::string>{"x"});
  }

  TEST_CASE("a single non-matching row forms CF") {
    const auto ds = numeric({{"g", {"in", "in", "in", "out"}}, {"x", {"0", "1", "2", "3"}}});
    const auto p = partition(ds, FilterStack({parse_constraint("g=in")}), {});
    CHECK(p.cf_rows == RowSet{3});
    CHECK(p.ex_rows.empty());
  }

  TEST_CASE("ties break by row index") {
    const auto ds = numeric({{"g", {"out", "in", "out", "out", "out"}}, {"x", {"1", "0", "1", "1", "1"}}});
    const auto p = partition(ds, FilterStack({parse_constraint("g=in")}), {});
    CHECK(p.cf_rows == RowSet{0, 2});
    CHECK(p.ex_rows == RowSet{3, 4});
  }

  TEST_CASE("counterfactual size") {
    CHECK(counterfactual_size(0.5, 1) == 1);
    CHECK(counterfactual_size(0.5, 4) == 2);
    CHECK(counterfactual_size(0.5, 5) == 3);
    CHECK(counterfactual_size(0.3, 10) == 3);
    CHECK(counterfactual_size(0.1, 30) == 3);
    CHECK(counterfactual_size(0.7, 10) == 7);
  }

  TEST_CASE("errors") {
    const auto ds = numeric({{"g", {"a", "b", "a"}}, {"x", {"0", "1", "2"}}});
    CHECK(code_of([&] { partition(ds, FilterStack({parse_constraint("x:5..6")}), {}); }) == ErrorCode::EmptyIncluded);
    CHECK(code_of([&] { partition(ds, FilterStack({parse_constraint("x:0..2")}), {}); }) ==
          ErrorCode::EmptyComplement);
    CHECK(code_of([&] { partition(ds, FilterStack({parse_constraint("g=a")}), {}, "x"); }) ==
          ErrorCode::NoUsableFeatures);
    SimilarityConfig bad;
    bad.cf_fraction = 1.0;
    CHECK(code_of([&] { partition(ds, FilterStack({parse_constraint("g=a")}), bad); }) == ErrorCode::InvalidConfig);
    bad.cf_fraction = 0.0;
    CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("included sample is a deterministic ascending subset") {
    RowSet rows(5000);
    std::iota(rows.begin(), rows.end(), 0);
    const auto a = sample_included(rows, 1000, 0);
    CHECK(a.size() == 1000);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a == sample_included(rows, 1000, 0));
    CHECK(a != sample_included(rows, 1000, 1));
    CHECK(sample_included(rows, 0, 0) == rows);
    const RowSet few{3, 9};
    CHECK(sample_included(few, 1000, 0) == few);
  }

  TEST_CASE("random datasets match the exact oracle") {
    fixture::Rng rng(99);
    int compared = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const auto ds = load_csv(fixture::random_csv(rng, 3, 80, 3, 7), "r");
      const std::string outcome = ds.column(ds.column_count() - 1).name();
      const auto c = fixture::random_constraint(ds, ds.column(0), rng);
      SimilarityConfig cfg;
      cfg.cf_fraction = fixture::coin(rng, 0.5) ? 0.5 : fixture::uniform(rng, 0.05, 0.95);
      SubsetPartition p;
      try {
        p = partition(ds, FilterStack({c}), cfg, outcome);
      } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::EmptyIncluded || e.code() == ErrorCode::EmptyComplement));
        continue;
      }
      const auto want = oracle::partition(ds, {c}, outcome, cfg.cf_fraction);
      CHECK(p.in_rows == want.in);
      REQUIRE(p.cf_rows.size() == want.cf.size());
      REQUIRE(p.ex_rows.size() == want.ex.size());
      for (std::size_t i = 0; i < p.cf_rows.size(); ++i)
        CHECK(std::fabs(p.cf_distance[i] - static_cast<double>(want.mean_distance.at(p.cf_rows[i]))) < 1e-12);
      if (want.ex.empty() || want.ex_min - want.cf_max > 1e-12) {
        CHECK(sorted(p.cf_rows) == sorted(want.cf));
        CHECK(sorted(p.ex_rows) == sorted(want.ex));
        ++compared;
      }
    }
    CHECK(compared > 50);
  }

  TEST_CASE("copying an IN row's features into a CF row never raises its mean distance when IN is uniform") {
    fixture::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 6 + fixture::pick(rng, 30);
      std::vector<std::string> g, x1, k;
      for (std::size_t r = 0; r < n; ++r) {
        const bool in = r < 2;
        g.push_back(in ? "in" : "out");
        x1.push_back(in ? "0.5" : fixture::fmt(fixture::uniform(rng)));
        k.push_back(in ? "p" : (fixture::coin(rng, 0.5) ? "p" : "q"));
      }
      auto ds = numeric({{"g", g}, {"x1", x1}, {"k", k}});
      const FilterStack stack({parse_constraint("g=in")});
      const auto before = partition(ds, stack, {});
      const RowIndex target = before.cf_rows.back();
      x1[target] = "0.5";
      k[target] = "p";
      const auto after = partition(numeric({{"g", g}, {"x1", x1}, {"k", k}}), stack, {});
      const auto pos = std::find(after.cf_rows.begin(), after.cf_rows.end(), target);
      REQUIRE(pos != after.cf_rows.end());
      CHECK(after.cf_distance[static_cast<std::size_t>(pos - after.cf_rows.begin())] <= before.cf_distance.back());
    }
  }

  TEST_CASE("mixed IN rows: copying one IN row can raise the mean distance") {
    // IN = {0, 1, 1} on one feature; a row at 1 has mean 1/3, a copy of row 0 has 2/3.
    const auto ds = numeric({{"g", {"in", "in", "in", "out"}}, {"x1", {"0", "1", "1", "1"}}});
    const auto copy = numeric({{"g", {"in", "in", "in", "out"}}, {"x1", {"0", "1", "1", "0"}}});
    const FilterStack stack({parse_constraint("g=in")});
    CHECK(partition(ds, stack, {}).cf_distance[0] == doctest::Approx(1.0 / 3.0));
    CHECK(partition(copy, stack, {}).cf_distance[0] == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("recidivism sample: filtering on female leaves only men in CF and EX") {
    const auto path = std::filesystem::path(CFX_TEST_DATA) / "compas-scores-two-years.csv";
    if (!std::filesystem::exists(path)) return;
    const auto raw = csv::parse(fixture::read_file(path));
    const auto text = fixture::recidivism_sample(raw, 1500, 1);
    if (!text) return;
    const auto ds = load_csv(*text, "recid");
    const auto p = partition(ds, FilterStack({parse_constraint("sex=Female")}), {}, "two_year_recid");
    const auto& sex = ds.column("sex");
    CHECK(!p.cf_rows.empty());
    for (RowIndex r : p.cf_rows) CHECK(*sex.cell(r) == "Male");
    for (RowIndex r : p.ex_rows) CHECK(*sex.cell(r) == "Male");
  }
}
