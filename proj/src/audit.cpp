#include "cfx/audit.hpp"

#include <cstdio>

namespace cfx {

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

AuditStep step_of(const AnalysisSnapshot& snap) {
  AuditStep step;
  step.filters = snap.filters;
  step.strength = snap.strength;
  for (const auto& view : snap.subsets) step.sizes.emplace_back(view.kind, view.rows.size());
  step.outcome = snap.outcome_distribution;
  return step;
}

std::string outcome_cell(const SubsetOutcome* o) {
  if (!o) return "-";
  std::string out;
  if (o->summary.bins) {
    const auto& b = *o->summary.bins;
    return "mean=" + fixed4(b.mean) + " min=" + fixed4(b.min) + " max=" + fixed4(b.max);
  }
  for (const auto& c : o->summary.categories) {
    if (!out.empty()) out += "  ";
    out += c.category + ": " + fixed4(c.fraction);
  }
  return out;
}

}  // namespace

AuditReport run_audit(std::shared_ptr<const Dataset> dataset, const std::string& outcome,
                      const std::vector<FilterConstraint>& constraints, Mode mode, const SimilarityConfig& config,
                      std::optional<std::string> selected_feature) {
  AuditReport report;
  report.dataset = dataset->name();
  report.outcome = outcome;
  report.mode = mode;
  Session session(dataset, dataset->name(), outcome, mode, config);
  for (const auto& c : constraints) report.steps.push_back(step_of(session.push_filter(c)));
  if (selected_feature) {
    report.snapshot = session.snapshot(std::string_view(*selected_feature));
  } else {
    report.snapshot = session.snapshot();
  }
  return report;
}

void to_json(json& j, const AuditReport& report) {
  json steps = json::array();
  for (const auto& step : report.steps) {
    json subsets = json::array();
    for (const auto& [kind, size] : step.sizes) {
      json s{{"name", subset_name(kind)},
             {"size", size},
             {"fraction", static_cast<double>(size) / static_cast<double>(report.snapshot.row_count)},
             {"outcome", nullptr}};
      if (const auto* o = step.outcome.find(kind)) s["outcome"] = o->summary;
      subsets.push_back(std::move(s));
    }
    json entry{{"filters", step.filters}, {"subsets", std::move(subsets)}, {"strength", nullptr}};
    if (step.strength) entry["strength"] = *step.strength;
    steps.push_back(std::move(entry));
  }
  j = json{{"dataset", report.dataset},
           {"outcome", report.outcome},
           {"mode", mode_name(report.mode)},
           {"steps", std::move(steps)},
           {"snapshot", report.snapshot}};
}

std::string render_text(const AuditReport& report) {
  std::string out = "dataset: " + report.dataset + " (n=" + std::to_string(report.snapshot.row_count) + ")\n";
  out += "outcome: " + report.outcome + " (" + std::string(type_name(report.snapshot.outcome_distribution.type)) +
         ")\nmode: " + std::string(mode_name(report.mode)) + "\n";
  const double n = static_cast<double>(report.snapshot.row_count);
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& step = report.steps[i];
    out += "\nstep " + std::to_string(i + 1) + ":";
    for (const auto& f : step.filters) out += " " + to_string(f);
    out += "\n";
    if (step.strength) {
      out += "  strength: " + std::string(strength_name(step.strength->strength)) + "  d=" + fixed4(step.strength->d) +
             "  measure=" + std::string(measure_name(step.strength->measure)) + "\n";
    } else if (report.mode == Mode::Counterfactual) {
      out += "  strength: unavailable\n";
    }
    for (const auto& [kind, size] : step.sizes) {
      char line[128];
      std::snprintf(line, sizeof line, "  %-10s size=%-7zu fraction=%s  ", std::string(subset_name(kind)).c_str(),
                    size, fixed4(static_cast<double>(size) / n).c_str());
      out += line + outcome_cell(step.outcome.find(kind)) + "\n";
    }
  }
  return out;
}

}  // namespace cfx
