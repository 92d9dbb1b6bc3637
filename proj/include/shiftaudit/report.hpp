#ifndef SHIFTAUDIT_REPORT_HPP
#define SHIFTAUDIT_REPORT_HPP

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftaudit/causal_graph.hpp"
#include "shiftaudit/fairness.hpp"
#include "shiftaudit/mitigation.hpp"
#include "shiftaudit/shift_tests.hpp"

namespace shiftaudit {

inline constexpr const char* kToolName = "shift-audit";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// All report pieces serialize through nlohmann::json with std::map-backed
// objects, so key order is canonical and serialize -> parse -> serialize is
// byte-identical.
using json = nlohmann::json;

inline json to_json(const TestResult& t) {
  return json{{"statistic", t.statistic},
              {"df", t.df},
              {"p_value", t.p_value},
              {"mean_source", t.means[0]},
              {"mean_target", t.means[1]},
              {"ess_source", t.ess[0]},
              {"ess_target", t.ess[1]}};
}

inline json to_json(const ShiftTestResult& r) {
  json tests = json::array();
  for (std::size_t i = 0; i < r.tests.size(); ++i) {
    json t = to_json(r.tests[i]);
    t["dim"] = r.dims[i];
    t["significant"] = static_cast<bool>(r.significant[i]);
    tests.push_back(std::move(t));
  }
  return json{{"node", r.node},
              {"verdict", r.verdict == ShiftVerdict::DirectEffect ? "DirectEffect" : "NoEvidence"},
              {"alpha", r.alpha},
              {"scheme", scheme_name(r.scheme)},
              {"blocking_set", r.blocking},
              {"blocking_verified", r.blocking_verified},
              {"used_summary", r.used_summary},
              {"dropped_rows_source", r.dropped_rows_source},
              {"dropped_rows_target", r.dropped_rows_target},
              {"tests", std::move(tests)},
              {"warnings", r.warnings}};
}

inline json to_json(const ShiftClassification& c) {
  auto names = [&](ShiftCategory cat) {
    auto it = c.contributing.find(cat);
    return it == c.contributing.end() ? std::vector<std::string>{} : it->second;
  };
  return json{{"verdict", shift_verdict_name(c.verdict)},
              {"contributing",
               json{{"demographic", names(ShiftCategory::Demographic)},
                    {"covariate", names(ShiftCategory::Covariate)},
                    {"label", names(ShiftCategory::Label)}}}};
}

inline json to_json(const CausalGraph& g, const SeparatingSets& sets) {
  return json{{"criterion", criterion_name(sets.criterion)},
              {"family", sets.family},
              {"non_attribute_content", non_attribute_content(g, sets)},
              {"table_entry", table_entry(g, sets)},
              {"trivial_predictor", sets.trivial_predictor}};
}

inline json to_json(const SubgroupAccuracy& a) {
  json per_group = json::object();
  for (const auto& [name, acc] : a.per_group) per_group[name] = acc;
  return json{{"k", a.k},
              {"per_group", std::move(per_group)},
              {"max_gap", a.max_gap},
              {"excluded_groups", a.excluded}};
}

inline json to_json(const EnvironmentFairness& env) {
  json acc = json::array();
  for (const auto& a : env.accuracy) acc.push_back(to_json(a));
  return json{{"demographic_parity_gap", env.demographic_parity},
              {"equalized_odds_gap", env.equalized_odds},
              {"subgroup_accuracy", std::move(acc)}};
}

inline json to_json(const FairnessReport& r) {
  json deltas = json::object();
  deltas["demographic_parity_gap"] = r.demographic_parity_delta;
  deltas["equalized_odds_gap"] = r.equalized_odds_delta;
  json acc_deltas = json::object();
  for (const auto& [k, d] : r.accuracy_gap_delta) acc_deltas["top" + std::to_string(k)] = d;
  deltas["max_accuracy_gap"] = std::move(acc_deltas);
  return json{{"source", to_json(r.source)},
              {"target", to_json(r.target)},
              {"deltas", std::move(deltas)},
              {"warnings", r.warnings}};
}

inline json to_json(const GroupThresholds& t) {
  json thr = json::object();
  for (const auto& [g, v] : t.thresholds) thr[g] = v;
  return json{{"criterion", criterion_name(t.criterion)},
              {"thresholds", std::move(thr)},
              {"achieved_fit_gap", t.achieved_gap},
              {"grid_step", t.grid_step},
              {"all_negative_sentinel", kAllNegativeThreshold}};
}

inline json to_json(const MitigationReport& r) {
  return json{{"criterion", criterion_name(r.criterion)},
              {"thresholds", to_json(r.thresholds)},
              {"source_gap_before", r.source_gap_before},
              {"source_gap_after", r.source_gap_after},
              {"target_gap_before", r.target_gap_before},
              {"target_gap_after", r.target_gap_after},
              {"fit_rows", r.fit_rows},
              {"test_rows", r.test_rows},
              {"post_processor", "per-group threshold grid search"}};
}

inline json report_envelope(json config_echo) {
  return json{{"schema_version", kReportSchemaVersion},
              {"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
              {"config", std::move(config_echo)}};
}

inline std::string render_report(const json& report) { return report.dump(2) + "\n"; }

inline void write_report(const json& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  out << render_report(report);
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_REPORT_HPP
