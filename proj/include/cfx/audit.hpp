#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfx/json_io.hpp"
#include "cfx/session.hpp"

namespace cfx {

/// State after applying the first k constraints of an audit.
struct AuditStep {
  std::vector<FilterConstraint> filters;
  std::optional<FilterStrengthReport> strength;
  std::vector<std::pair<SubsetKind, std::size_t>> sizes;
  OutcomeDistribution outcome;
};

struct AuditReport {
  std::string dataset;
  std::string outcome;
  Mode mode = Mode::Counterfactual;
  std::vector<AuditStep> steps;
  AnalysisSnapshot snapshot;  // after the last constraint
};

/// Pushes the constraints one at a time through a fresh session.
AuditReport run_audit(std::shared_ptr<const Dataset> dataset, const std::string& outcome,
                      const std::vector<FilterConstraint>& constraints, Mode mode, const SimilarityConfig& config,
                      std::optional<std::string> selected_feature = std::nullopt);

void to_json(json& j, const AuditReport& report);
/// Human-readable table; every number is the JSON value rounded to 4 decimals.
std::string render_text(const AuditReport& report);

}  // namespace cfx
