#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/dataset.hpp"
#include "cfx/filter.hpp"
#include "cfx/partition.hpp"
#include "cfx/stats.hpp"

namespace cfx {

/// Counterfactual shows IN/CF/EX; Control shows IN against the undivided
/// complement (EX_control) and never reports a filter strength.
enum class Mode { Counterfactual, Control };
std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Feature-vs-outcome counts for one subset. Each axis is either the
/// column's categories or its shared numeric bins.
struct JointDistribution {
  std::vector<std::string> feature_labels;
  std::vector<double> feature_edges;
  std::vector<std::string> outcome_labels;
  std::vector<double> outcome_edges;
  std::vector<std::vector<std::size_t>> counts;  // [feature bin][outcome bin]
};

JointDistribution joint_distribution(const Dataset& dataset, std::string_view feature, std::string_view outcome,
                                     std::span<const RowIndex> rows);

struct SubsetView {
  SubsetKind kind = SubsetKind::In;
  RowSet rows;  // ascending
  double fraction = 0.0;
  std::vector<AssociationRecord> associations;  // one per non-outcome column
  std::optional<DistributionSummary> feature;
  std::optional<JointDistribution> feature_vs_outcome;
};

struct AnalysisSnapshot {
  std::size_t row_count = 0;
  std::string outcome;
  Mode mode = Mode::Counterfactual;
  std::vector<FilterConstraint> filters;
  std::optional<SubsetPartition> partition;  // counterfactual mode with filters
  std::vector<SubsetView> subsets;
  OutcomeDistribution outcome_distribution;
  std::optional<FilterStrengthReport> strength;
  std::optional<std::string> selected_feature;

  const SubsetView* find(SubsetKind kind) const;
};

/// Computes the full snapshot from scratch. Pure in its arguments.
AnalysisSnapshot analyze(const Dataset& dataset, std::string_view outcome, const FilterStack& stack,
                         const SimilarityConfig& config, Mode mode,
                         std::optional<std::string_view> selected_feature = std::nullopt);

/// Adds per-subset feature distributions and feature-vs-outcome counts.
void attach_feature_views(AnalysisSnapshot& snapshot, const Dataset& dataset, std::string_view feature);

struct SessionEvent {
  enum class Op { Push, Pop };
  Op op = Op::Push;
  std::optional<FilterConstraint> constraint;  // push
  std::string column;                          // pop

  bool operator==(const SessionEvent&) const = default;
};

/// Everything needed to rebuild a session.
struct SessionLog {
  std::string dataset;
  std::string outcome;
  Mode mode = Mode::Counterfactual;
  SimilarityConfig config;
  std::vector<SessionEvent> events;
};

/// Exploration state for one outcome. Operations on a single session must
/// be serialized by the caller; snapshots are independent values.
class Session {
 public:
  /// Throws UnknownColumn or InvalidConfig.
  Session(std::shared_ptr<const Dataset> dataset, std::string dataset_id, std::string outcome, Mode mode,
          SimilarityConfig config = {});

  /// Replays a log; throws whatever the original operations would.
  static Session replay(std::shared_ptr<const Dataset> dataset, const SessionLog& log);

  const Dataset& dataset() const { return *dataset_; }
  const std::string& outcome() const { return log_.outcome; }
  Mode mode() const { return log_.mode; }
  const SimilarityConfig& config() const { return log_.config; }
  const FilterStack& filters() const { return stack_; }
  const SessionLog& log() const { return log_; }

  /// Replaces a same-column constraint in place. On error the stack is unchanged.
  const AnalysisSnapshot& push_filter(FilterConstraint constraint);
  /// Throws NotInStack. On error the stack is unchanged.
  const AnalysisSnapshot& pop_filter(std::string_view column);
  AnalysisSnapshot snapshot(std::optional<std::string_view> selected_feature = std::nullopt) const;

 private:
  std::shared_ptr<const Dataset> dataset_;
  SessionLog log_;
  FilterStack stack_;
  AnalysisSnapshot current_;
};

}  // namespace cfx
