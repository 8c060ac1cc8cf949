#include "cfx/json_io.hpp"

#include <cmath>
#include <limits>

#include "cfx/error.hpp"

namespace cfx {

std::string canonical(const json& value) { return value.dump(); }

void to_json(json& j, const DistributionSummary& s) {
  j = json{{"column", s.column}, {"type", type_name(s.type)}, {"observed", s.observed}, {"missing", s.missing}};
  if (is_categorical(s.type)) {
    json cats = json::array();
    for (const auto& c : s.categories) {
      cats.push_back({{"category", c.category}, {"count", c.count}, {"fraction", c.fraction}});
    }
    j["categories"] = std::move(cats);
  }
  if (s.bins) {
    j["bins"] = {{"edges", s.bins->edges}, {"counts", s.bins->counts}, {"fractions", s.bins->fractions},
                 {"min", s.bins->min},     {"max", s.bins->max},       {"mean", s.bins->mean}};
  }
}

void to_json(json& j, const FilterConstraint& c) { j = to_string(c); }

void to_json(json& j, const SimilarityConfig& c) {
  j = json{{"cf_fraction", c.cf_fraction},
           {"exclude_filtered", c.exclude_filtered},
           {"exclude_outcome", c.exclude_outcome},
           {"features", nullptr},
           {"in_sample_cap", c.in_sample_cap},
           {"seed", c.seed}};
  if (c.features) j["features"] = *c.features;
}

void to_json(json& j, const SubsetPartition& p) {
  j = json{{"in", p.in_rows},
           {"cf", p.cf_rows},
           {"ex", p.ex_rows},
           {"cf_distance", p.cf_distance},
           {"ex_distance", p.ex_distance},
           {"features", p.features},
           {"config", p.config}};
}

void to_json(json& j, const AssociationRecord& r) {
  j = json{{"feature", r.feature},
           {"method", method_name(r.method)},
           {"scope", subset_name(r.scope)},
           {"rows_used", r.rows_used},
           {"value", nullptr}};
  if (r.value) j["value"] = *r.value;
}

void to_json(json& j, const FilterStrengthReport& r) {
  j = json{{"d", r.d},
           {"measure", measure_name(r.measure)},
           {"strength", strength_name(r.strength)},
           {"sizes", {{"in", r.in_size}, {"cf", r.cf_size}, {"ex", r.ex_size}}}};
}

void to_json(json& j, const JointDistribution& joint) {
  auto axis = [](const std::vector<std::string>& labels, const std::vector<double>& edges) {
    return labels.empty() ? json{{"edges", edges}} : json{{"labels", labels}};
  };
  j = json{{"feature_axis", axis(joint.feature_labels, joint.feature_edges)},
           {"outcome_axis", axis(joint.outcome_labels, joint.outcome_edges)},
           {"counts", joint.counts}};
}

void to_json(json& j, const AnalysisSnapshot& s) {
  json subsets = json::array();
  for (const auto& view : s.subsets) {
    json v{{"name", subset_name(view.kind)},
           {"size", view.rows.size()},
           {"fraction", view.fraction},
           {"rows", view.rows},
           {"associations", view.associations},
           {"outcome", nullptr}};
    if (const auto* o = s.outcome_distribution.find(view.kind)) v["outcome"] = o->summary;
    if (s.selected_feature) {
      v["feature"] = view.feature ? json(*view.feature) : json(nullptr);
      v["feature_vs_outcome"] = view.feature_vs_outcome ? json(*view.feature_vs_outcome) : json(nullptr);
    }
    subsets.push_back(std::move(v));
  }
  j = json{{"n", s.row_count},
           {"outcome", s.outcome},
           {"outcome_type", type_name(s.outcome_distribution.type)},
           {"mode", mode_name(s.mode)},
           {"filters", s.filters},
           {"subsets", std::move(subsets)},
           {"partition", nullptr},
           {"strength", nullptr},
           {"selected_feature", nullptr}};
  if (s.partition) j["partition"] = *s.partition;
  if (s.strength) j["strength"] = *s.strength;
  if (s.selected_feature) j["selected_feature"] = *s.selected_feature;
}

void to_json(json& j, const SessionEvent& e) {
  if (e.op == SessionEvent::Op::Push) {
    j = json{{"op", "push"}, {"constraint", *e.constraint}};
  } else {
    j = json{{"op", "pop"}, {"column", e.column}};
  }
}

void to_json(json& j, const SessionLog& log) {
  j = json{{"dataset", log.dataset},
           {"outcome", log.outcome},
           {"mode", mode_name(log.mode)},
           {"config", log.config},
           {"events", log.events}};
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedRequest, what); }

double bound(const json& j, double open) {
  if (j.is_null()) return open;
  if (!j.is_number()) throw Error(ErrorCode::BadConstraint, "range bounds must be numbers or null");
  return j.get<double>();
}

}  // namespace

FilterConstraint constraint_from_json(const json& j) {
  if (j.is_string()) return parse_constraint(j.get<std::string>());
  if (!j.is_object() || !j.contains("column") || !j["column"].is_string()) {
    throw Error(ErrorCode::BadConstraint, "constraint must be a string or an object with a column");
  }
  const auto column = j["column"].get<std::string>();
  if (j.contains("range")) {
    const json& r = j["range"];
    if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::BadConstraint, "range must be [lo, hi]");
    constexpr double inf = std::numeric_limits<double>::infinity();
    return FilterConstraint::range(column, bound(r[0], -inf), bound(r[1], inf));
  }
  if (j.contains("values")) {
    const json& v = j["values"];
    if (!v.is_array() || v.empty()) throw Error(ErrorCode::BadConstraint, "values must be a nonempty array");
    std::vector<std::string> values;
    for (const auto& item : v) {
      if (!item.is_string()) throw Error(ErrorCode::BadConstraint, "category values must be strings");
      values.push_back(item.get<std::string>());
    }
    return FilterConstraint::categories(column, std::move(values));
  }
  throw Error(ErrorCode::BadConstraint, "constraint object needs 'range' or 'values'");
}

SimilarityConfig config_from_json(const json& j) {
  SimilarityConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) malformed("config must be an object");
  try {
    if (j.contains("features") && !j["features"].is_null()) c.features = j["features"].get<std::vector<std::string>>();
    if (j.contains("exclude_filtered")) c.exclude_filtered = j["exclude_filtered"].get<bool>();
    if (j.contains("exclude_outcome")) c.exclude_outcome = j["exclude_outcome"].get<bool>();
    if (j.contains("cf_fraction")) c.cf_fraction = j["cf_fraction"].get<double>();
    if (j.contains("in_sample_cap")) c.in_sample_cap = j["in_sample_cap"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    malformed(std::string("bad config: ") + e.what());
  }
  validate(c);
  return c;
}

SessionLog session_log_from_json(const json& j) {
  if (!j.is_object()) malformed("session log must be an object");
  SessionLog log;
  try {
    log.dataset = j.at("dataset").get<std::string>();
    log.outcome = j.at("outcome").get<std::string>();
    const auto mode = parse_mode(j.value("mode", std::string("counterfactual")));
    if (!mode) malformed("unknown mode");
    log.mode = *mode;
    log.config = config_from_json(j.value("config", json(nullptr)));
    for (const auto& e : j.value("events", json::array())) {
      SessionEvent event;
      const auto op = e.at("op").get<std::string>();
      if (op == "push") {
        event.op = SessionEvent::Op::Push;
        event.constraint = constraint_from_json(e.at("constraint"));
      } else if (op == "pop") {
        event.op = SessionEvent::Op::Pop;
        event.column = e.at("column").get<std::string>();
      } else {
        malformed("unknown event op '" + op + "'");
      }
      log.events.push_back(std::move(event));
    }
  } catch (const json::exception& e) {
    malformed(std::string("bad session log: ") + e.what());
  }
  return log;
}

json column_manifest(const Dataset& dataset) {
  json columns = json::array();
  for (const auto& col : dataset.columns()) {
    json c{{"name", col.name()}, {"type", type_name(col.type())}, {"missing", col.missing_count()}};
    if (col.categorical()) c["categories"] = col.categories();
    if (col.numeric_coded()) {
      c["min"] = col.min();
      c["max"] = col.max();
    }
    columns.push_back(std::move(c));
  }
  return json{{"name", dataset.name()}, {"n", dataset.row_count()}, {"columns", std::move(columns)}};
}

}  // namespace cfx
