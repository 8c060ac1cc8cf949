#pragma once

#include <string>

#include <json.hpp>

#include "cfx/dataset.hpp"
#include "cfx/filter.hpp"
#include "cfx/partition.hpp"
#include "cfx/session.hpp"
#include "cfx/stats.hpp"

namespace cfx {

using json = nlohmann::json;

/// Sorted keys, compact separators, shortest round-trip doubles.
std::string canonical(const json& value);

void to_json(json& j, const DistributionSummary& summary);
void to_json(json& j, const FilterConstraint& constraint);
void to_json(json& j, const SimilarityConfig& config);
void to_json(json& j, const SubsetPartition& partition);
void to_json(json& j, const AssociationRecord& record);
void to_json(json& j, const FilterStrengthReport& report);
void to_json(json& j, const JointDistribution& joint);
void to_json(json& j, const AnalysisSnapshot& snapshot);
void to_json(json& j, const SessionEvent& event);
void to_json(json& j, const SessionLog& log);

/// Accepts the textual form or {"column", "range": [lo, hi]} / {"column", "values": [...]},
/// where a null range bound is open. Throws Error(BadConstraint).
FilterConstraint constraint_from_json(const json& j);
/// Missing keys keep their defaults. Throws Error(MalformedRequest).
SimilarityConfig config_from_json(const json& j);
SessionLog session_log_from_json(const json& j);

/// Schema of a dataset: name, row count and per-column type, missing count, categories.
json column_manifest(const Dataset& dataset);

}  // namespace cfx
