#include "cfx/session.hpp"

#include <algorithm>

#include "cfx/error.hpp"

namespace cfx {

std::string_view mode_name(Mode mode) { return mode == Mode::Counterfactual ? "counterfactual" : "control"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "counterfactual") return Mode::Counterfactual;
  if (text == "control") return Mode::Control;
  return std::nullopt;
}

namespace {

struct Axis {
  std::vector<std::string> labels;
  std::vector<double> edges;
  std::size_t size() const { return labels.empty() ? edges.size() - 1 : labels.size(); }
};

Axis axis_of(const Column& col) {
  Axis axis;
  if (col.categorical()) {
    axis.labels = col.categories();
  } else {
    axis.edges = shared_bin_edges(col);
  }
  return axis;
}

std::size_t slot(const Axis& axis, const Column& col, RowIndex row) {
  if (!axis.labels.empty()) return static_cast<std::size_t>(col.code(row));
  return bin_index(axis.edges, col.number(row));
}

std::size_t complete_rows(const Column& a, const Column& b, std::span<const RowIndex> rows) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](RowIndex r) { return !a.missing(r) && !b.missing(r); }));
}

std::vector<AssociationRecord> association_table(const Dataset& dataset, std::string_view outcome,
                                                 std::span<const RowIndex> rows, SubsetKind kind) {
  const Column& o = dataset.column(outcome);
  std::vector<AssociationRecord> table;
  for (const Column& f : dataset.columns()) {
    if (f.name() == o.name()) continue;
    try {
      table.push_back(association(dataset, f.name(), outcome, rows, kind));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewRows) throw;
      table.push_back({f.name(), std::nullopt, association_method(f.type(), o.type()), kind,
                       complete_rows(f, o, rows)});
    }
  }
  return table;
}

RowSet all_rows(std::size_t n) {
  RowSet rows(n);
  for (RowIndex r = 0; r < n; ++r) rows[r] = r;
  return rows;
}

RowSet complement_of(const RowSet& included, std::size_t n) {
  RowSet out;
  out.reserve(n - included.size());
  std::size_t next = 0;
  for (RowIndex r = 0; r < n; ++r) {
    if (next < included.size() && included[next] == r) {
      ++next;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

JointDistribution joint_distribution(const Dataset& dataset, std::string_view feature, std::string_view outcome,
                                     std::span<const RowIndex> rows) {
  const Column& f = dataset.column(feature);
  const Column& o = dataset.column(outcome);
  const Axis fa = axis_of(f);
  const Axis oa = axis_of(o);
  JointDistribution joint;
  joint.counts.assign(fa.size(), std::vector<std::size_t>(oa.size(), 0));
  for (RowIndex r : rows) {
    if (f.missing(r) || o.missing(r)) continue;
    ++joint.counts[slot(fa, f, r)][slot(oa, o, r)];
  }
  joint.feature_labels = fa.labels;
  joint.feature_edges = fa.edges;
  joint.outcome_labels = oa.labels;
  joint.outcome_edges = oa.edges;
  return joint;
}

const SubsetView* AnalysisSnapshot::find(SubsetKind kind) const {
  for (const auto& s : subsets) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

AnalysisSnapshot analyze(const Dataset& dataset, std::string_view outcome, const FilterStack& stack,
                         const SimilarityConfig& config, Mode mode, std::optional<std::string_view> selected_feature) {
  validate(config);
  const Column& outcome_column = dataset.column(outcome);
  for (const auto& c : stack.constraints()) validate(dataset, c, outcome);

  AnalysisSnapshot snap;
  snap.row_count = dataset.row_count();
  snap.outcome = outcome_column.name();
  snap.mode = mode;
  snap.filters = stack.constraints();

  std::vector<std::pair<SubsetKind, RowSet>> subsets;
  if (stack.empty()) {
    subsets.emplace_back(SubsetKind::In, all_rows(dataset.row_count()));
    if (mode == Mode::Counterfactual) {
      subsets.emplace_back(SubsetKind::Counterfactual, RowSet{});
      subsets.emplace_back(SubsetKind::Excluded, RowSet{});
    } else {
      subsets.emplace_back(SubsetKind::ExcludedControl, RowSet{});
    }
  } else if (mode == Mode::Counterfactual) {
    SubsetPartition p = partition(dataset, stack, config, outcome);
    RowSet cf = p.cf_rows;
    RowSet ex = p.ex_rows;
    std::sort(cf.begin(), cf.end());
    std::sort(ex.begin(), ex.end());
    subsets.emplace_back(SubsetKind::In, p.in_rows);
    subsets.emplace_back(SubsetKind::Counterfactual, std::move(cf));
    subsets.emplace_back(SubsetKind::Excluded, std::move(ex));
    snap.partition = std::move(p);
  } else {
    RowSet in = included_mask(dataset, stack);
    if (in.empty()) throw Error(ErrorCode::EmptyIncluded, "the filter matches no rows");
    if (in.size() == dataset.row_count()) throw Error(ErrorCode::EmptyComplement, "the filter matches every row");
    RowSet rest = complement_of(in, dataset.row_count());
    subsets.emplace_back(SubsetKind::In, std::move(in));
    subsets.emplace_back(SubsetKind::ExcludedControl, std::move(rest));
  }

  snap.outcome_distribution.outcome = outcome_column.name();
  snap.outcome_distribution.type = outcome_column.type();
  const double n = static_cast<double>(dataset.row_count());
  for (auto& [kind, rows] : subsets) {
    SubsetView view;
    view.kind = kind;
    view.fraction = static_cast<double>(rows.size()) / n;
    view.associations = association_table(dataset, outcome, rows, kind);
    const bool has_outcome = std::any_of(rows.begin(), rows.end(), [&](RowIndex r) { return !outcome_column.missing(r); });
    if (has_outcome) snap.outcome_distribution.subsets.push_back(subset_outcome(dataset, outcome, rows, kind));
    view.rows = std::move(rows);
    snap.subsets.push_back(std::move(view));
  }

  if (snap.partition && snap.outcome_distribution.find(SubsetKind::In) &&
      snap.outcome_distribution.find(SubsetKind::Counterfactual)) {
    const auto [d, measure] = in_cf_difference(snap.outcome_distribution);
    snap.strength = FilterStrengthReport{d,
                                         measure,
                                         classify_strength(d),
                                         snap.partition->in_rows.size(),
                                         snap.partition->cf_rows.size(),
                                         snap.partition->ex_rows.size()};
  }

  if (selected_feature) attach_feature_views(snap, dataset, *selected_feature);
  return snap;
}

void attach_feature_views(AnalysisSnapshot& snapshot, const Dataset& dataset, std::string_view feature) {
  const Column& f = dataset.column(feature);
  snapshot.selected_feature = f.name();
  for (auto& view : snapshot.subsets) {
    view.feature.reset();
    const bool observed = std::any_of(view.rows.begin(), view.rows.end(), [&](RowIndex r) { return !f.missing(r); });
    if (observed) view.feature = column_distribution(dataset, feature, view.rows);
    view.feature_vs_outcome = joint_distribution(dataset, feature, snapshot.outcome, view.rows);
  }
}

Session::Session(std::shared_ptr<const Dataset> dataset, std::string dataset_id, std::string outcome, Mode mode,
                 SimilarityConfig config)
    : dataset_(std::move(dataset)) {
  log_.dataset = std::move(dataset_id);
  log_.outcome = std::move(outcome);
  log_.mode = mode;
  log_.config = std::move(config);
  current_ = analyze(*dataset_, log_.outcome, stack_, log_.config, log_.mode);
}

Session Session::replay(std::shared_ptr<const Dataset> dataset, const SessionLog& log) {
  Session session(std::move(dataset), log.dataset, log.outcome, log.mode, log.config);
  for (const auto& event : log.events) {
    if (event.op == SessionEvent::Op::Push) {
      if (!event.constraint) throw Error(ErrorCode::MalformedRequest, "push event without a constraint");
      session.push_filter(*event.constraint);
    } else {
      session.pop_filter(event.column);
    }
  }
  return session;
}

const AnalysisSnapshot& Session::push_filter(FilterConstraint constraint) {
  validate(*dataset_, constraint, log_.outcome);
  FilterStack next = stack_;
  next.push(constraint);
  current_ = analyze(*dataset_, log_.outcome, next, log_.config, log_.mode);
  stack_ = std::move(next);
  log_.events.push_back({SessionEvent::Op::Push, std::move(constraint), {}});
  return current_;
}

const AnalysisSnapshot& Session::pop_filter(std::string_view column) {
  FilterStack next = stack_;
  if (!next.remove(column)) {
    throw Error(ErrorCode::NotInStack, "no filter on column '" + std::string(column) + "'");
  }
  current_ = analyze(*dataset_, log_.outcome, next, log_.config, log_.mode);
  stack_ = std::move(next);
  log_.events.push_back({SessionEvent::Op::Pop, std::nullopt, std::string(column)});
  return current_;
}

AnalysisSnapshot Session::snapshot(std::optional<std::string_view> selected_feature) const {
  AnalysisSnapshot snap = current_;
  if (selected_feature) attach_feature_views(snap, *dataset_, *selected_feature);
  return snap;
}

}  // namespace cfx
