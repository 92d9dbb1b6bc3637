// shift-audit: diagnose the causal structure of a source/target distribution
// shift, derive transferable-fairness separating sets from a causal graph,
// and audit whether group-fairness metrics and threshold post-processing
// survive the shift.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftaudit/causal_graph.hpp"
#include "shiftaudit/dataset.hpp"
#include "shiftaudit/fairness.hpp"
#include "shiftaudit/mitigation.hpp"
#include "shiftaudit/parallel.hpp"
#include "shiftaudit/report.hpp"
#include "shiftaudit/shift_tests.hpp"
#include "shiftaudit/synthetic.hpp"

namespace sa = shiftaudit;
using sa::json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

sa::FairnessCriterion parse_criterion(const std::string& s) {
  if (s == "dp") return sa::FairnessCriterion::DemographicParity;
  if (s == "eo") return sa::FairnessCriterion::EqualizedOdds;
  sa::fail(sa::errc::invalid_spec, "criterion must be dp or eo");
}

sa::CausalGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) sa::fail(sa::errc::io_error, "cannot open graph spec '" + path + "'");
  return sa::parse_graph_spec(in);
}

// Environment assignment: either two files, or one file split by a 0/1 column.
struct Environments {
  sa::Dataset source;
  sa::Dataset target;
};

sa::Dataset filter_rows(const sa::Dataset& data, const std::vector<std::size_t>& rows) {
  sa::Dataset out;
  for (const auto& name : data.column_names()) {
    const auto& c = data.column(name);
    if (c.type == sa::Dataset::ColumnType::Numeric) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (auto r : rows) v.push_back(c.num[r]);
      out.add_numeric(name, std::move(v));
    } else {
      std::vector<std::string> v;
      v.reserve(rows.size());
      for (auto r : rows) v.push_back(c.cat[r]);
      out.add_categorical(name, std::move(v));
    }
  }
  return out;
}

Environments load_environments(const std::string& source_path, const std::string& target_path,
                               const std::string& env_col) {
  const bool two_files = !target_path.empty();
  const bool env_mode = !env_col.empty();
  if (two_files == env_mode)
    sa::fail(sa::errc::invalid_spec,
             "exactly one environment assignment: --target XOR --env-col");
  if (two_files)
    return {sa::read_csv_file(source_path), sa::read_csv_file(target_path)};

  auto all = sa::read_csv_file(source_path);
  const auto& env = all.numeric(env_col);
  std::vector<std::size_t> rows0, rows1;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] == 0.0)
      rows0.push_back(i);
    else if (env[i] == 1.0)
      rows1.push_back(i);
    else
      sa::fail(sa::errc::invalid_spec,
               "environment column '" + env_col + "' must be 0/1 (row " + std::to_string(i) + ")");
  }
  return {filter_rows(all, rows0), filter_rows(all, rows1)};
}

// ---------------------------------------------------------------------------
// audit-shift

struct AuditShiftOptions {
  std::string source, target, graph, env_col, out;
  double alpha = 0.05;
  std::string scheme = "ow";
  std::uint64_t seed = 0;
  std::size_t max_dims = 30;
  double clip = 0.01;
};

json run_node_tests(const Environments& env, const sa::CausalGraph& graph,
                    const AuditShiftOptions& opt, std::vector<std::string>& warnings,
                    std::vector<sa::ShiftTestResult>& primary) {
  // observed nodes must have data; unobserved ones are skipped when absent
  std::vector<std::string> tested_nodes;
  for (const auto& n : graph.nodes()) {
    if (n.role == sa::NodeRole::Environment) continue;
    auto cols_s = sa::node_columns(env.source, n.name);
    auto cols_t = sa::node_columns(env.target, n.name);
    if (!cols_s.empty() && cols_s == cols_t) {
      tested_nodes.push_back(n.name);
      continue;
    }
    if (n.observed) {
      std::string where = cols_s.empty() ? "source" : "target";
      sa::fail(sa::errc::missing_columns,
               "observed node '" + n.name + "' has no matching columns in the " + where +
                   " data; mark it unobserved in the graph if it is unavailable");
    }
    warnings.push_back("node '" + n.name + "' skipped: unobserved and not present in both files");
  }

  std::vector<sa::WeightScheme> schemes;
  if (opt.scheme == "ow")
    schemes = {sa::WeightScheme::Overlap};
  else if (opt.scheme == "ipw")
    schemes = {sa::WeightScheme::InverseProbability};
  else if (opt.scheme == "both")
    schemes = {sa::WeightScheme::Overlap, sa::WeightScheme::InverseProbability};
  else
    sa::fail(sa::errc::invalid_spec, "scheme must be ow, ipw or both");

  struct Slot {
    std::vector<sa::ShiftTestResult> per_scheme;
  };
  std::vector<Slot> slots(tested_nodes.size());
  sa::parallel_for(tested_nodes.size(), [&](std::size_t i) {
    for (auto scheme : schemes) {
      sa::ShiftTestConfig cfg;
      cfg.alpha = opt.alpha;
      cfg.scheme = scheme;
      cfg.max_dims = opt.max_dims;
      cfg.clip = opt.clip;
      cfg.seed = opt.seed;
      slots[i].per_scheme.push_back(
          sa::direct_effect_test(env.source, env.target, graph, tested_nodes[i], cfg));
    }
  });

  json results = json::array();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    json node_block = json::object();
    node_block["node"] = tested_nodes[i];
    json per_scheme = json::array();
    for (const auto& r : slots[i].per_scheme) per_scheme.push_back(sa::to_json(r));
    node_block["results"] = std::move(per_scheme);
    if (slots[i].per_scheme.size() == 2 &&
        slots[i].per_scheme[0].verdict != slots[i].per_scheme[1].verdict)
      warnings.push_back("node '" + tested_nodes[i] + "': OW and IPW verdicts disagree");
    results.push_back(std::move(node_block));
    primary.push_back(slots[i].per_scheme.front());
  }
  return results;
}

int cmd_audit_shift(const AuditShiftOptions& opt) {
  auto graph = load_graph(opt.graph);
  auto env = load_environments(opt.source, opt.target, opt.env_col);

  std::vector<std::string> warnings;
  std::vector<sa::ShiftTestResult> primary;
  json node_results = run_node_tests(env, graph, opt, warnings, primary);
  auto classification = sa::classify_shift(primary, graph);

  json config_echo{{"command", "audit-shift"},
                   {"source", opt.source},
                   {"target", opt.target},
                   {"env_col", opt.env_col},
                   {"graph", opt.graph},
                   {"alpha", opt.alpha},
                   {"scheme", opt.scheme},
                   {"seed", opt.seed},
                   {"max_dims", opt.max_dims},
                   {"clip", opt.clip}};
  json report = sa::report_envelope(std::move(config_echo));
  report["shift_tests"] = std::move(node_results);
  report["classification"] = sa::to_json(classification);
  report["separating_sets"] =
      json{{"demographic_parity",
            sa::to_json(graph, sa::separating_set(graph, sa::FairnessCriterion::DemographicParity))},
           {"equalized_odds",
            sa::to_json(graph, sa::separating_set(graph, sa::FairnessCriterion::EqualizedOdds))}};
  report["warnings"] = warnings;
  sa::write_report(report, opt.out);

  std::cout << "shift classification: " << sa::shift_verdict_name(classification.verdict) << "\n";
  for (const auto& r : primary)
    std::cout << "  " << r.node << ": "
              << (r.verdict == sa::ShiftVerdict::DirectEffect ? "direct effect" : "no evidence")
              << "\n";
  std::cout << "report written to " << opt.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// separating-set

int cmd_separating_set(const std::string& graph_path, const std::string& criterion) {
  auto graph = load_graph(graph_path);
  auto crit = parse_criterion(criterion);
  auto sets = sa::separating_set(graph, crit);
  if (sets.family.empty()) {
    std::cout << "no valid set: trivial predictor\n";
    return 0;
  }
  auto print_set = [](const std::vector<std::string>& v) {
    std::cout << "{";
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << v[i];
    std::cout << "}";
  };
  for (const auto& v : sets.family) {
    std::cout << "maximal set: ";
    print_set(v);
    std::cout << "\n";
  }
  std::cout << "table entry: ";
  print_set(sa::table_entry(graph, sets));
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scenario = "AC-a";
  std::size_t n = 5000;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::optional<double> delta_a, delta_x, delta_y;
  bool hide_m = false, hide_xs = false;
};

sa::Dataset with_id_column(const sa::Dataset& data, std::size_t first_id) {
  sa::Dataset out;
  std::vector<double> ids(data.row_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = double(first_id + i);
  out.add_numeric("id", std::move(ids));
  for (const auto& name : data.column_names()) {
    const auto& c = data.column(name);
    if (c.type == sa::Dataset::ColumnType::Numeric)
      out.add_numeric(name, c.num);
    else
      out.add_categorical(name, c.cat);
  }
  return out;
}

int cmd_simulate(const SimulateOptions& opt) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);

  auto data = [&]() -> sa::GeneratedData {
    if (opt.scenario == "derm") {
      sa::DermSpec spec;
      spec.n_per_env = opt.n;
      spec.seed = opt.seed;
      spec.hide_m_in_target = opt.hide_m;
      spec.hide_xs_in_target = opt.hide_xs;
      return sa::generate_dermatology_style(spec);
    }
    sa::ScenarioSpec spec;
    spec.id = sa::scenario_from_name(opt.scenario);
    spec.n_per_env = opt.n;
    spec.seed = opt.seed;
    if (opt.delta_a) spec.magnitudes.delta_a = *opt.delta_a;
    if (opt.delta_x) spec.magnitudes.delta_x = *opt.delta_x;
    if (opt.delta_y) spec.magnitudes.delta_y = *opt.delta_y;
    return sa::generate(spec);
  }();

  const auto src_path = (fs::path(opt.out_dir) / "source.csv").string();
  const auto tgt_path = (fs::path(opt.out_dir) / "target.csv").string();
  const auto graph_path = (fs::path(opt.out_dir) / "graph.spec").string();
  sa::write_csv_file(with_id_column(data.source, 0), src_path);
  sa::write_csv_file(with_id_column(data.target, data.source.row_count()), tgt_path);
  std::ofstream gout(graph_path, std::ios::binary);
  if (!gout) sa::fail(sa::errc::io_error, "cannot open '" + graph_path + "'");
  sa::format_graph_spec(data.truth, gout);

  std::cout << "wrote " << src_path << ", " << tgt_path << ", " << graph_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fairness / mitigate shared plumbing

struct PredictionOptions {
  std::string source, target, env_col, preds;
  std::string group_col, label_col;
  std::string score_cols;  // comma separated
  std::string out;
};

// Joins the predictions file onto one environment's rows through the `id`
// column and assembles that environment's prediction set.
sa::PredictionSet join_predictions(const sa::Dataset& data, const sa::Dataset& preds,
                                   const PredictionOptions& opt) {
  const auto score_cols = split_list(opt.score_cols);
  if (score_cols.empty()) sa::fail(sa::errc::invalid_spec, "--score-cols must name a column");

  if (!data.has_column("id")) sa::fail(sa::errc::id_mismatch, "data file lacks an 'id' column");
  if (!preds.has_column("id"))
    sa::fail(sa::errc::id_mismatch, "predictions file lacks an 'id' column");

  std::map<std::string, std::size_t> pred_row;
  for (std::size_t i = 0; i < preds.row_count(); ++i) {
    if (!pred_row.emplace(preds.cell_text("id", i), i).second)
      sa::fail(sa::errc::id_mismatch, "duplicate id '" + preds.cell_text("id", i) +
                                          "' in the predictions file");
  }

  std::vector<std::vector<double>> scores(score_cols.size());
  std::vector<int> labels;
  std::vector<std::string> groups;
  const auto& label_col = data.numeric(opt.label_col);
  for (std::size_t i = 0; i < data.row_count(); ++i) {
    auto it = pred_row.find(data.cell_text("id", i));
    if (it == pred_row.end())
      sa::fail(sa::errc::id_mismatch,
               "no prediction row for id '" + data.cell_text("id", i) + "'");
    for (std::size_t c = 0; c < score_cols.size(); ++c)
      scores[c].push_back(preds.numeric(score_cols[c])[it->second]);
    double y = label_col[i];
    if (std::isnan(y) || y != std::floor(y) || y < 0)
      sa::fail(sa::errc::invalid_spec, "label column must hold nonnegative integers");
    labels.push_back(static_cast<int>(y));
    groups.push_back(data.cell_text(opt.group_col, i));
  }
  if (score_cols.size() == 1)
    return sa::PredictionSet::binary(std::move(scores[0]), std::move(labels), std::move(groups));
  return sa::PredictionSet::multiclass(std::move(scores), std::move(labels), std::move(groups));
}

int cmd_fairness(const PredictionOptions& opt, const std::string& topk) {
  auto env = load_environments(opt.source, opt.target, opt.env_col);
  auto preds = sa::read_csv_file(opt.preds);
  auto source_preds = join_predictions(env.source, preds, opt);
  auto target_preds = join_predictions(env.target, preds, opt);

  std::vector<int> k_list;
  for (const auto& tok : split_list(topk)) k_list.push_back(std::stoi(tok));
  if (k_list.empty()) k_list = {1};

  auto fairness = sa::fairness_transfer_report(source_preds, target_preds, k_list);

  json config_echo{{"command", "fairness"},      {"source", opt.source},
                   {"target", opt.target},       {"env_col", opt.env_col},
                   {"preds", opt.preds},         {"group_col", opt.group_col},
                   {"label_col", opt.label_col}, {"score_cols", opt.score_cols},
                   {"topk", topk}};
  json report = sa::report_envelope(std::move(config_echo));
  report["fairness"] = sa::to_json(fairness);
  report["warnings"] = fairness.warnings;
  sa::write_report(report, opt.out);

  std::cout << "dp gap: source " << fairness.source.demographic_parity << " -> target "
            << fairness.target.demographic_parity << "\n";
  std::cout << "eo gap: source " << fairness.source.equalized_odds << " -> target "
            << fairness.target.equalized_odds << "\n";
  std::cout << "report written to " << opt.out << "\n";
  return 0;
}

int cmd_mitigate(const PredictionOptions& opt, const std::string& criterion, double grid_step,
                 std::uint64_t seed) {
  auto env = load_environments(opt.source, opt.target, opt.env_col);
  auto preds = sa::read_csv_file(opt.preds);
  auto source_preds = join_predictions(env.source, preds, opt);
  auto target_preds = join_predictions(env.target, preds, opt);

  sa::MitigationConfig cfg;
  cfg.grid_step = grid_step;
  cfg.seed = seed;
  auto result =
      sa::mitigation_transfer_experiment(source_preds, target_preds, parse_criterion(criterion), cfg);

  json config_echo{{"command", "mitigate"},      {"source", opt.source},
                   {"target", opt.target},       {"env_col", opt.env_col},
                   {"preds", opt.preds},         {"group_col", opt.group_col},
                   {"label_col", opt.label_col}, {"score_cols", opt.score_cols},
                   {"criterion", criterion},     {"grid_step", grid_step},
                   {"seed", seed}};
  json report = sa::report_envelope(std::move(config_echo));
  report["mitigation"] = sa::to_json(result);
  sa::write_report(report, opt.out);

  std::cout << "source gap: " << result.source_gap_before << " -> " << result.source_gap_after
            << "\n";
  std::cout << "target gap: " << result.target_gap_before << " -> " << result.target_gap_after
            << "\n";
  std::cout << "report written to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal shift diagnosis and fairness transfer audit"};
  app.require_subcommand(1);

  // audit-shift
  AuditShiftOptions audit;
  auto* audit_cmd = app.add_subcommand("audit-shift", "per-node direct-effect tests + taxonomy");
  audit_cmd->add_option("--source", audit.source, "source CSV")->required();
  audit_cmd->add_option("--target", audit.target, "target CSV");
  audit_cmd->add_option("--env-col", audit.env_col, "0/1 environment column (single-file mode)");
  audit_cmd->add_option("--graph", audit.graph, "graph spec file")->required();
  audit_cmd->add_option("--alpha", audit.alpha, "significance level");
  audit_cmd->add_option("--scheme", audit.scheme, "ow|ipw|both");
  audit_cmd->add_option("--seed", audit.seed, "RNG seed");
  audit_cmd->add_option("--max-dims", audit.max_dims, "per-dimension testing cutoff");
  audit_cmd->add_option("--clip", audit.clip, "propensity score clip");
  audit_cmd->add_option("--out", audit.out, "report path")->required();

  // separating-set
  std::string sep_graph, sep_criterion = "dp";
  auto* sep_cmd = app.add_subcommand("separating-set", "transferable-fairness feature sets");
  sep_cmd->add_option("--graph", sep_graph, "graph spec file")->required();
  sep_cmd->add_option("--criterion", sep_criterion, "dp|eo");

  // simulate
  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "write a synthetic scenario to CSV");
  sim_cmd->add_option("--scenario", sim.scenario, "AC-a..AC-d, C-a..C-d or derm");
  sim_cmd->add_option("--n", sim.n, "samples per environment");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_option("--out-dir", sim.out_dir, "output directory")->required();
  double da = 0, dx = 0, dy = 0;
  auto* da_opt = sim_cmd->add_option("--delta-a", da, "demographic magnitude override");
  auto* dx_opt = sim_cmd->add_option("--delta-x", dx, "covariate magnitude override");
  auto* dy_opt = sim_cmd->add_option("--delta-y", dy, "label magnitude override");
  sim_cmd->add_flag("--hide-m", sim.hide_m, "derm: drop M from the target");
  sim_cmd->add_flag("--hide-xs", sim.hide_xs, "derm: drop X_s from the target");

  // fairness
  PredictionOptions fair;
  std::string topk = "1";
  auto* fair_cmd = app.add_subcommand("fairness", "fairness metrics per environment + deltas");
  fair_cmd->add_option("--source", fair.source, "source CSV")->required();
  fair_cmd->add_option("--target", fair.target, "target CSV");
  fair_cmd->add_option("--env-col", fair.env_col, "0/1 environment column (single-file mode)");
  fair_cmd->add_option("--preds", fair.preds, "predictions CSV joined on 'id'")->required();
  fair_cmd->add_option("--group-col", fair.group_col, "sensitive attribute column")->required();
  fair_cmd->add_option("--label-col", fair.label_col, "true label column")->required();
  fair_cmd->add_option("--score-cols", fair.score_cols, "score column(s), comma separated")
      ->required();
  fair_cmd->add_option("--topk", topk, "top-k list, e.g. 1,3");
  fair_cmd->add_option("--out", fair.out, "report path")->required();

  // mitigate
  PredictionOptions mit;
  std::string mit_criterion = "dp";
  double grid_step = 0.005;
  std::uint64_t mit_seed = 0;
  auto* mit_cmd = app.add_subcommand("mitigate", "fit thresholds on source, test transfer");
  mit_cmd->add_option("--source", mit.source, "source CSV")->required();
  mit_cmd->add_option("--target", mit.target, "target CSV");
  mit_cmd->add_option("--env-col", mit.env_col, "0/1 environment column (single-file mode)");
  mit_cmd->add_option("--preds", mit.preds, "predictions CSV joined on 'id'")->required();
  mit_cmd->add_option("--group-col", mit.group_col, "sensitive attribute column")->required();
  mit_cmd->add_option("--label-col", mit.label_col, "true label column")->required();
  mit_cmd->add_option("--score-cols", mit.score_cols, "score column (binary)")->required();
  mit_cmd->add_option("--criterion", mit_criterion, "dp|eo");
  mit_cmd->add_option("--grid-step", grid_step, "threshold grid step");
  mit_cmd->add_option("--seed", mit_seed, "split seed");
  mit_cmd->add_option("--out", mit.out, "report path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*audit_cmd) return cmd_audit_shift(audit);
    if (*sep_cmd) return cmd_separating_set(sep_graph, sep_criterion);
    if (*sim_cmd) {
      if (*da_opt) sim.delta_a = da;
      if (*dx_opt) sim.delta_x = dx;
      if (*dy_opt) sim.delta_y = dy;
      return cmd_simulate(sim);
    }
    if (*fair_cmd) return cmd_fairness(fair, topk);
    if (*mit_cmd) return cmd_mitigate(mit, mit_criterion, grid_step, mit_seed);
  } catch (const sa::audit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
