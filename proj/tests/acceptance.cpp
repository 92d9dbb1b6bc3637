// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Statistical criteria run replicated studies against the
// synthetic scenario generators; graph criteria run against independent
// brute-force oracles.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "shiftaudit/causal_graph.hpp"
#include "shiftaudit/fairness.hpp"
#include "shiftaudit/mitigation.hpp"
#include "shiftaudit/parallel.hpp"
#include "shiftaudit/shift_tests.hpp"
#include "shiftaudit/stats.hpp"
#include "shiftaudit/synthetic.hpp"
#include "shiftaudit/weighting.hpp"

using namespace shiftaudit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome pass(const std::string& detail) { return {true, detail}; }
Outcome failure(const std::string& detail) { return {false, detail}; }

// ---------------------------------------------------------------------------
// 1. Separating-set table: the 8 scenario graphs reproduce the review table.

Outcome separating_set_table() {
  struct Row {
    ScenarioId id;
    FairnessCriterion crit;
    std::vector<std::string> expected;
  };
  const std::vector<Row> rows = {
      {ScenarioId::ACa, FairnessCriterion::EqualizedOdds, {"X"}},
      {ScenarioId::ACb, FairnessCriterion::EqualizedOdds, {"A"}},
      {ScenarioId::ACc, FairnessCriterion::EqualizedOdds, {}},
      {ScenarioId::ACd, FairnessCriterion::EqualizedOdds, {}},
      {ScenarioId::Ca, FairnessCriterion::DemographicParity, {"A", "X"}},
      {ScenarioId::Cb, FairnessCriterion::DemographicParity, {}},
      {ScenarioId::Cc, FairnessCriterion::DemographicParity, {}},
      {ScenarioId::Cd, FairnessCriterion::DemographicParity, {}},
  };
  for (const auto& row : rows) {
    ScenarioSpec spec;
    spec.id = row.id;
    auto graph = scenario_graph(spec);
    auto entry = table_entry(graph, separating_set(graph, row.crit));
    if (entry != row.expected) {
      std::string got = "{";
      for (const auto& v : entry) got += v + ",";
      return failure(std::string(scenario_name(row.id)) + " produced " + got + "}");
    }
  }
  return pass("8/8 rows exact");
}

// ---------------------------------------------------------------------------
// 2. d-separation equals brute-force path enumeration: 1,000 random DAGs,
//    every node pair, every conditioning set of size <= 3.

Outcome dsep_oracle_equivalence() {
  std::atomic<long> checks{0};
  std::atomic<bool> ok{true};
  parallel_for(1000, [&](std::size_t rep) {
    if (!ok.load()) return;
    std::mt19937_64 rng(870000 + rep);
    auto dag = oracles::random_dag(rng, 8);
    const int n = dag.plain.n;
    long local = 0;
    for (int u = 0; u < n && ok.load(); ++u) {
      for (int w = u + 1; w < n; ++w) {
        // all conditioning subsets of size <= 3 over the remaining nodes
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
          if (i != u && i != w) rest.push_back(i);
        const int m = static_cast<int>(rest.size());
        for (int mask = 0; mask < (1 << m); ++mask) {
          if (__builtin_popcount(static_cast<unsigned>(mask)) > 3) continue;
          std::vector<char> zmask(static_cast<size_t>(n), 0);
          std::vector<std::string> znames;
          for (int i = 0; i < m; ++i)
            if ((mask >> i) & 1) {
              zmask[static_cast<size_t>(rest[i])] = 1;
              znames.push_back("n" + std::to_string(rest[i]));
            }
          bool expected = oracles::d_separated_bruteforce(dag.plain, u, w, zmask);
          bool got = d_separated(dag.graph, "n" + std::to_string(u), "n" + std::to_string(w), znames);
          ++local;
          if (got != expected) {
            ok.store(false);
            return;
          }
        }
      }
    }
    checks += local;
  });
  if (!ok.load()) return failure("disagreement with the path-enumeration oracle");
  return pass(std::to_string(checks.load()) + " checks, 0 disagreements");
}

// ---------------------------------------------------------------------------
// 3. Uniform-weight weighted Welch equals the reference unweighted Welch.

Outcome welch_degeneracy() {
  std::mt19937_64 rng(424242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> size_dist(4, 400);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(size_dist(rng)), b(size_dist(rng));
    double shift = gauss(rng), scale = 0.5 + std::fabs(gauss(rng));
    for (auto& v : a) v = gauss(rng);
    for (auto& v : b) v = gauss(rng) * scale + shift;
    auto got = weighted_welch_ttest(a, WeightVector::uniform(a.size()), b,
                                    WeightVector::uniform(b.size()));
    auto ref = oracles::welch_unweighted(a, b);
    auto rel = [](double x, double y) { return std::fabs(x - y) / std::max(1e-300, std::fabs(y)); };
    worst = std::max({worst, rel(got.statistic, ref.t), rel(got.df, ref.df),
                      rel(got.p_value, ref.p)});
  }
  if (worst > 1e-10)
    return failure("worst relative error " + std::to_string(worst));
  std::ostringstream os;
  os.precision(3);
  os << "100 instances, worst relative error " << std::scientific << worst;
  return pass(os.str());
}

// ---------------------------------------------------------------------------
// 4. Null calibration: no-shift replicates keep per-node rejection <= 0.07.
//    Compound ids cannot be all-zero (their spec needs >= 2 live magnitudes),
//    so the study covers the six single-edge scenarios.

Outcome null_calibration() {
  const std::vector<ScenarioId> ids = {ScenarioId::ACa, ScenarioId::ACb, ScenarioId::ACc,
                                       ScenarioId::Ca, ScenarioId::Cb, ScenarioId::Cc};
  const int reps = 500;
  const char* nodes[3] = {"A", "Y", "X"};
  std::ostringstream detail;
  for (auto id : ids) {
    std::vector<std::array<int, 3>> flags(reps, {0, 0, 0});
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
      ScenarioSpec spec;
      spec.id = id;
      spec.magnitudes = {0.0, 0.0, 0.0};
      spec.n_per_env = 2000;
      spec.seed = 52000 + rep;
      auto g = generate(spec);
      ShiftTestConfig cfg;
      cfg.seed = spec.seed;
      for (int k = 0; k < 3; ++k) {
        auto r = direct_effect_test(g.source, g.target, g.truth, nodes[k], cfg);
        flags[rep][static_cast<size_t>(k)] = r.verdict == ShiftVerdict::DirectEffect ? 1 : 0;
      }
    });
    for (int k = 0; k < 3; ++k) {
      int count = 0;
      for (const auto& f : flags) count += f[static_cast<size_t>(k)];
      double rate = double(count) / double(reps);
      if (rate > 0.07)
        return failure(std::string(scenario_name(id)) + " node " + nodes[k] + " rejection rate " +
                       std::to_string(rate) + " > 0.07");
      detail << scenario_name(id) << ":" << nodes[k] << "=" << count << " ";
    }
  }
  return pass("max per-node rejections within 0.05+0.02 (" + detail.str() + "/500)");
}

// ---------------------------------------------------------------------------
// 5. Power: planted edges detected >= 90/100; absent edges flagged <= 8/100.

Outcome power_study() {
  struct Row {
    ScenarioId id;
    std::string planted;
  };
  const std::vector<Row> rows = {{ScenarioId::ACa, "A"}, {ScenarioId::ACb, "X"},
                                 {ScenarioId::ACc, "Y"}, {ScenarioId::Ca, "A"},
                                 {ScenarioId::Cb, "X"},  {ScenarioId::Cc, "Y"}};
  const char* nodes[3] = {"A", "Y", "X"};
  std::ostringstream detail;
  for (const auto& row : rows) {
    std::vector<std::array<int, 3>> flags(100, {0, 0, 0});
    parallel_for(100, [&](std::size_t rep) {
      ScenarioSpec spec;
      spec.id = row.id;
      spec.n_per_env = 5000;
      spec.seed = 61000 + rep;
      auto g = generate(spec);
      ShiftTestConfig cfg;
      cfg.seed = spec.seed;
      for (int k = 0; k < 3; ++k) {
        auto r = direct_effect_test(g.source, g.target, g.truth, nodes[k], cfg);
        flags[rep][static_cast<size_t>(k)] = r.verdict == ShiftVerdict::DirectEffect ? 1 : 0;
      }
    });
    for (int k = 0; k < 3; ++k) {
      int count = 0;
      for (const auto& f : flags) count += f[static_cast<size_t>(k)];
      bool is_planted = row.planted == nodes[k];
      if (is_planted && count < 90)
        return failure(std::string(scenario_name(row.id)) + " planted " + nodes[k] + " detected " +
                       std::to_string(count) + "/100 < 90");
      if (!is_planted && count > 8)
        return failure(std::string(scenario_name(row.id)) + " absent " + nodes[k] + " flagged " +
                       std::to_string(count) + "/100 > 8");
      if (is_planted) detail << scenario_name(row.id) << "=" << count << " ";
    }
  }
  return pass("planted " + detail.str() + "/100; absent edges within 8/100");
}

// ---------------------------------------------------------------------------
// 6. Balance: OW-weighted means of a shifted binary blocking variable agree
//    across environments within 0.02 at n = 10,000 per environment.

Outcome balance_check() {
  std::mt19937_64 rng(777);
  std::bernoulli_distribution d0(0.3), d1(0.7);
  std::vector<double> v;
  std::vector<int> env;
  for (int i = 0; i < 10000; ++i) {
    v.push_back(d0(rng) ? 1.0 : 0.0);
    env.push_back(0);
  }
  for (int i = 0; i < 10000; ++i) {
    v.push_back(d1(rng) ? 1.0 : 0.0);
    env.push_back(1);
  }
  Dataset pooled;
  pooled.add_numeric("v", v);
  auto model = fit_propensity(pooled, env, {.seed = 777});

  double mean[2];
  for (int s = 0; s < 2; ++s) {
    Dataset part;
    std::vector<double> vs;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (env[i] == s) vs.push_back(v[i]);
    part.add_numeric("v", std::move(vs));
    auto w = compute_weights(model, part, s, WeightScheme::Overlap);
    double m = 0;
    for (std::size_t i = 0; i < part.row_count(); ++i) m += w.weights[i] * part.numeric("v")[i];
    mean[s] = m;
  }
  double diff = std::fabs(mean[0] - mean[1]);
  if (diff > 0.02) return failure("weighted means differ by " + std::to_string(diff));
  std::ostringstream os;
  os.precision(3);
  os << "weighted means differ by " << std::scientific << diff;
  return pass(os.str());
}

// ---------------------------------------------------------------------------
// 7. Compound verdict on the two compound generators, >= 95/100 replicates.

Outcome compound_verdict() {
  std::ostringstream detail;
  for (auto id : {ScenarioId::ACd, ScenarioId::Cd}) {
    std::vector<int> hits(100, 0);
    parallel_for(100, [&](std::size_t rep) {
      ScenarioSpec spec;
      spec.id = id;
      spec.n_per_env = 5000;
      spec.seed = 73000 + rep;
      auto g = generate(spec);
      ShiftTestConfig cfg;
      cfg.seed = spec.seed;
      std::vector<ShiftTestResult> results;
      for (const char* node : {"A", "Y", "X"})
        results.push_back(direct_effect_test(g.source, g.target, g.truth, node, cfg));
      auto c = classify_shift(results, g.truth);
      hits[rep] = c.verdict == ShiftClassification::Verdict::Compound ? 1 : 0;
    });
    int count = 0;
    for (int h : hits) count += h;
    if (count < 95)
      return failure(std::string(scenario_name(id)) + " compound in " + std::to_string(count) +
                     "/100 < 95");
    detail << scenario_name(id) << "=" << count << " ";
  }
  return pass(detail.str() + "/100");
}

// ---------------------------------------------------------------------------
// 8. Mitigation non-transfer. The default magnitudes shift both groups
//    uniformly, which source-fitted thresholds survive, so this study uses a
//    compound instance with a dominant covariate shift (0.1, 2.0, 0.5) where
//    the target pushes scores into threshold saturation.

PredictionSet scored_predictions(const Dataset& d, const SummaryModel& scorer) {
  std::vector<std::size_t> rows(d.row_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto scores = scorer.scores(d, rows);
  std::vector<int> labels;
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    labels.push_back(static_cast<int>(d.numeric("Y")[i]));
    groups.push_back(d.numeric("A")[i] == 1.0 ? "a1" : "a0");
  }
  return PredictionSet::binary(std::move(scores), std::move(labels), std::move(groups));
}

Outcome mitigation_non_transfer() {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t rep) {
    ScenarioSpec spec;
    spec.id = ScenarioId::ACd;
    spec.n_per_env = 4000;
    spec.seed = 81000 + rep;
    spec.magnitudes = {0.1, 2.0, 0.5};
    auto g = generate(spec);

    std::vector<std::string> y(g.source.row_count());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = g.source.numeric("Y")[i] == 1.0 ? "1" : "0";
    std::vector<std::size_t> rows(g.source.row_count());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    auto scorer = fit_summary_model(g.source, {"X1", "X2", "X3"}, y, rows, {.seed = spec.seed});

    auto r = mitigation_transfer_experiment(scored_predictions(g.source, scorer),
                                            scored_predictions(g.target, scorer),
                                            FairnessCriterion::EqualizedOdds,
                                            {.grid_step = 0.005, .seed = spec.seed});
    bool source_drops = r.source_gap_after <= 0.5 * r.source_gap_before;
    bool target_resists = r.target_gap_after > 0.5 * r.target_gap_before;
    hits[rep] = source_drops && target_resists ? 1 : 0;
  });
  int count = 0;
  for (int h : hits) count += h;
  if (count < 80) return failure("non-transfer in " + std::to_string(count) + "/100 < 80");
  return pass("non-transfer in " + std::to_string(count) + "/100");
}

// ---------------------------------------------------------------------------
// 9. Determinism through the CLI: repeated commands produce identical bytes.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SHIFT_AUDIT_BIN) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

Outcome cli_determinism() {
  fs::path dir = fs::temp_directory_path() / ("shift_audit_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto d1 = (dir / "a").string();
  auto d2 = (dir / "b").string();
  if (run_cli("simulate --scenario C-d --n 1200 --seed 99 --out-dir " + d1) != 0 ||
      run_cli("simulate --scenario C-d --n 1200 --seed 99 --out-dir " + d2) != 0)
    return failure("simulate failed");
  for (const char* f : {"source.csv", "target.csv", "graph.spec"})
    if (slurp(fs::path(d1) / f) != slurp(fs::path(d2) / f))
      return failure(std::string("simulate outputs differ: ") + f);

  std::string audit = "audit-shift --source " + d1 + "/source.csv --target " + d1 +
                      "/target.csv --graph " + d1 + "/graph.spec --seed 4 --scheme both --out ";
  if (run_cli(audit + d1 + "/r1.json") != 0 || run_cli(audit + d1 + "/r2.json") != 0)
    return failure("audit-shift failed");
  if (slurp(fs::path(d1) / "r1.json") != slurp(fs::path(d1) / "r2.json"))
    return failure("audit-shift reports differ across runs");
  fs::remove_all(dir);
  return pass("simulate + audit-shift byte-identical across repeated runs");
}

// ---------------------------------------------------------------------------
// 10. Fairness-metric unit examples, asserted exactly as stated.

Outcome fairness_examples() {
  auto check = [](bool cond, const std::string& what) {
    if (!cond) throw audit_error(errc::invalid_spec, what);
  };
  try {
    {  // constant scores -> dp gap 0
      std::vector<double> s(80, 0.7);
      std::vector<int> y(80, 1);
      std::vector<std::string> g;
      for (int i = 0; i < 80; ++i) g.push_back(i < 40 ? "a" : "b");
      check(demographic_parity_gap(PredictionSet::binary(s, y, g)) == 0.0, "constant-score dp");
    }
    {  // group means 0.6 / 0.2 / 0.5 -> 0.4
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      auto add = [&](const char* name, double mean) {
        for (int i = 0; i < 40; ++i) {
          s.push_back(i % 2 ? mean + 0.1 : mean - 0.1);
          y.push_back(i % 2);
          g.push_back(name);
        }
      };
      add("a", 0.6);
      add("b", 0.2);
      add("c", 0.5);
      double gap = demographic_parity_gap(PredictionSet::binary(s, y, g));
      check(std::fabs(gap - 0.4) < 1e-12, "max-min dp");
    }
    {  // sampled means 0.55 / 0.45 at n = 10,000 -> 0.10 +- 0.02
      std::mt19937_64 rng(1618);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      for (int i = 0; i < 10000; ++i) {
        bool first = i % 2 == 0;
        s.push_back(std::clamp((first ? 0.55 : 0.45) + (unif(rng) - 0.5) * 0.5, 0.0, 1.0));
        y.push_back(0);
        g.push_back(first ? "a" : "b");
      }
      double gap = demographic_parity_gap(PredictionSet::binary(s, y, g));
      check(std::fabs(gap - 0.10) <= 0.02, "sampled dp gap");
    }
    {  // perfect predictor -> eo gap 0, subgroup accuracy 1.0 / gap 0
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      for (int i = 0; i < 200; ++i) {
        int label = i % 2;
        s.push_back(double(label));
        y.push_back(label);
        g.push_back(i % 4 < 2 ? "a" : "b");
      }
      auto p = PredictionSet::binary(s, y, g);
      check(equalized_odds_gap(p) == 0.0, "perfect predictor eo");
      auto acc = subgroup_accuracy(p, 1);
      for (const auto& [name, a] : acc.per_group) check(a == 1.0, "perfect predictor accuracy");
      check(acc.max_gap == 0.0, "perfect predictor accuracy gap");
    }
    {  // class-1 gap 0.2, class-0 gap 0.0 -> eo 0.1
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      for (int i = 0; i < 400; ++i) {
        bool a = i % 2 == 0;
        int label = (i / 2) % 2;
        s.push_back(label == 1 ? (a ? 0.9 : 0.7) : 0.1);
        y.push_back(label);
        g.push_back(a ? "a" : "b");
      }
      double gap = equalized_odds_gap(PredictionSet::binary(s, y, g));
      check(std::fabs(gap - 0.1) < 1e-12, "planted eo gap");
    }
    {  // single group -> SingleGroup error
      std::vector<double> s(50, 0.4);
      std::vector<int> y;
      for (int i = 0; i < 50; ++i) y.push_back(i % 2);
      std::vector<std::string> g(50, "only");
      bool threw = false;
      try {
        (void)equalized_odds_gap(PredictionSet::binary(s, y, g));
      } catch (const audit_error& e) {
        threw = e.code() == errc::single_group;
      }
      check(threw, "single group error");
    }
    {  // 3-class rank construction: top-1 = 0, top-3 = 1
      const int n = 90;
      std::vector<std::vector<double>> scores(3, std::vector<double>(n));
      std::vector<int> labels(n);
      std::vector<std::string> group(n);
      for (int i = 0; i < n; ++i) {
        int truth = i % 3;
        int top = (truth + 1) % 3;
        for (int c = 0; c < 3; ++c) scores[size_t(c)][size_t(i)] = c == top ? 0.6 : (c == truth ? 0.3 : 0.1);
        labels[size_t(i)] = truth;
        group[size_t(i)] = i % 2 ? "a" : "b";
      }
      auto p = PredictionSet::multiclass(scores, labels, group);
      for (const auto& [name, a] : subgroup_accuracy(p, 1).per_group) check(a == 0.0, "top-1 rank");
      for (const auto& [name, a] : subgroup_accuracy(p, 3).per_group) check(a == 1.0, "top-3 rank");
    }
    {  // planted per-group accuracies 0.9 / 0.7 -> gap 0.20 +- 0.02
      std::mt19937_64 rng(2024);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      for (int i = 0; i < 10000; ++i) {
        bool a = i % 2 == 0;
        int label = unif(rng) < 0.5 ? 1 : 0;
        bool correct = unif(rng) < (a ? 0.9 : 0.7);
        s.push_back(correct == (label == 1) ? 0.9 : 0.1);
        y.push_back(label);
        g.push_back(a ? "a" : "b");
      }
      auto acc = subgroup_accuracy(PredictionSet::binary(s, y, g), 1);
      check(std::fabs(acc.max_gap - 0.20) <= 0.02, "planted accuracy gap");
    }
    {  // identical prediction sets -> all deltas 0
      std::vector<double> s;
      std::vector<int> y;
      std::vector<std::string> g;
      for (int i = 0; i < 200; ++i) {
        s.push_back(0.1 + 0.8 * double(i % 10) / 9.0);
        y.push_back(i % 2);
        g.push_back(i % 4 < 2 ? "a" : "b");
      }
      auto p = PredictionSet::binary(s, y, g);
      auto r = fairness_transfer_report(p, p, {1});
      check(r.demographic_parity_delta == 0.0 && r.equalized_odds_delta == 0.0 &&
                r.accuracy_gap_delta[0].second == 0.0,
            "identical environments deltas");
    }
  } catch (const audit_error& e) {
    return failure(e.what());
  }
  return pass("all stated examples hold");
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"separating-set-table", 1.0, separating_set_table},
      {"dsep-oracle-equivalence", 30.0, dsep_oracle_equivalence},
      {"welch-uniform-degeneracy", 60.0, welch_degeneracy},
      {"null-calibration", 600.0, null_calibration},
      {"power-single-edge", 600.0, power_study},
      {"ow-balance", 60.0, balance_check},
      {"compound-verdict", 600.0, compound_verdict},
      {"mitigation-non-transfer", 600.0, mitigation_non_transfer},
      {"cli-determinism", 120.0, cli_determinism},
      {"fairness-unit-examples", 60.0, fairness_examples},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = failure(std::string("exception: ") + e.what());
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = elapsed <= c.budget_seconds;
    bool ok = outcome.pass && in_budget;
    if (!ok) ++failures;
    std::string note = outcome.detail;
    if (!in_budget)
      note += " (over budget of " + std::to_string(c.budget_seconds) + "s)";
    std::printf("[%s] %-26s %7.2fs  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), elapsed,
                note.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
