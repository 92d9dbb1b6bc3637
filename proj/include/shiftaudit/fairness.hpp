#ifndef SHIFTAUDIT_FAIRNESS_HPP
#define SHIFTAUDIT_FAIRNESS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shiftaudit/errors.hpp"

namespace shiftaudit {

// Aligned per-sample predictions for one environment. Binary tasks carry a
// single score column holding P(class 1); multiclass tasks one column per
// class. Hard labels default to the 0.5 threshold (binary) or the argmax.
struct PredictionSet {
  std::vector<std::vector<double>> scores;  // scores[c][i], class-major
  std::vector<int> labels;                  // true labels in 0..n_classes-1
  std::vector<std::string> group;
  std::vector<int> hard;
  int n_classes = 2;

  std::size_t size() const { return labels.size(); }

  static PredictionSet binary(std::vector<double> score, std::vector<int> labels,
                              std::vector<std::string> group) {
    PredictionSet p;
    p.n_classes = 2;
    p.labels = std::move(labels);
    p.group = std::move(group);
    p.hard.resize(score.size());
    for (std::size_t i = 0; i < score.size(); ++i) p.hard[i] = score[i] >= 0.5 ? 1 : 0;
    p.scores.push_back(std::move(score));
    p.validate();
    return p;
  }

  static PredictionSet multiclass(std::vector<std::vector<double>> scores, std::vector<int> labels,
                                  std::vector<std::string> group) {
    PredictionSet p;
    p.n_classes = static_cast<int>(scores.size());
    p.scores = std::move(scores);
    p.labels = std::move(labels);
    p.group = std::move(group);
    p.hard.resize(p.labels.size());
    for (std::size_t i = 0; i < p.hard.size(); ++i) {
      int best = 0;
      for (int c = 1; c < p.n_classes; ++c)
        if (p.scores[c][i] > p.scores[best][i]) best = c;
      p.hard[i] = best;
    }
    p.validate();
    return p;
  }

  void validate() const {
    if (scores.empty()) fail(errc::invalid_spec, "prediction set has no score columns");
    if (n_classes > 2 && static_cast<int>(scores.size()) != n_classes)
      fail(errc::invalid_spec, "multiclass predictions need one score column per class");
    const std::size_t n = labels.size();
    if (group.size() != n || hard.size() != n)
      fail(errc::invalid_spec, "prediction columns are not aligned");
    for (const auto& col : scores) {
      if (col.size() != n) fail(errc::invalid_spec, "prediction columns are not aligned");
      for (double s : col)
        if (!(s >= 0.0 && s <= 1.0)) fail(errc::invalid_spec, "scores must lie in [0,1]");
    }
    for (int y : labels)
      if (y < 0 || y >= n_classes) fail(errc::invalid_spec, "label outside class range");
  }
};

struct FairnessConfig {
  std::size_t min_group_size = 20;  // smaller groups are excluded, never silently
};

namespace detail {

struct GroupSplit {
  std::vector<std::string> available;  // sorted, count >= min_group_size
  std::vector<std::string> excluded;
  std::map<std::string, std::vector<std::size_t>> rows;
};

inline GroupSplit split_groups(const PredictionSet& preds, const FairnessConfig& cfg) {
  GroupSplit out;
  for (std::size_t i = 0; i < preds.size(); ++i) out.rows[preds.group[i]].push_back(i);
  for (const auto& [name, rows] : out.rows)
    (rows.size() >= cfg.min_group_size ? out.available : out.excluded).push_back(name);
  return out;
}

inline void require_binary(const PredictionSet& preds, const char* metric) {
  if (preds.n_classes != 2)
    fail(errc::invalid_spec,
         std::string(metric) + " is defined for binary tasks; use subgroup accuracy for multiclass");
}

}  // namespace detail

// max - min over sensitive groups of the mean prediction. `thresholded` swaps
// the mean score for the positive-prediction rate of the hard labels.
inline double demographic_parity_gap(const PredictionSet& preds, const FairnessConfig& cfg = {},
                                     bool thresholded = false) {
  detail::require_binary(preds, "demographic parity");
  auto groups = detail::split_groups(preds, cfg);
  if (groups.available.size() < 2)
    fail(errc::single_group, "need at least 2 groups of size >= " +
                                 std::to_string(cfg.min_group_size));
  double lo = 1.0, hi = 0.0;
  for (const auto& name : groups.available) {
    double m = 0;
    for (std::size_t i : groups.rows[name])
      m += thresholded ? double(preds.hard[i]) : preds.scores[0][i];
    m /= double(groups.rows[name].size());
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi - lo;
}

// Demographic-parity-style gap within each true class, averaged across the
// two classes. Groups missing a class drop out of that class's gap; the
// caller can surface that through `notes`.
inline double equalized_odds_gap(const PredictionSet& preds, const FairnessConfig& cfg = {},
                                 bool thresholded = false,
                                 std::vector<std::string>* notes = nullptr) {
  detail::require_binary(preds, "equalized odds");
  auto groups = detail::split_groups(preds, cfg);
  if (groups.available.size() < 2)
    fail(errc::single_group, "need at least 2 groups of size >= " +
                                 std::to_string(cfg.min_group_size));

  double total = 0;
  int classes_counted = 0;
  for (int y = 0; y <= 1; ++y) {
    double lo = 1.0, hi = 0.0;
    int groups_in_class = 0;
    for (const auto& name : groups.available) {
      double m = 0;
      std::size_t n = 0;
      for (std::size_t i : groups.rows[name]) {
        if (preds.labels[i] != y) continue;
        m += thresholded ? double(preds.hard[i]) : preds.scores[0][i];
        ++n;
      }
      if (n == 0) {
        if (notes)
          notes->push_back("group '" + name + "' has no class-" + std::to_string(y) +
                           " samples; excluded from that class's gap");
        continue;
      }
      m /= double(n);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
      ++groups_in_class;
    }
    if (groups_in_class >= 2) {
      total += hi - lo;
      ++classes_counted;
    } else if (notes) {
      notes->push_back("class " + std::to_string(y) +
                       " has fewer than 2 groups represented; skipped");
    }
  }
  if (classes_counted == 0)
    fail(errc::missing_class_in_group, "no class has 2 or more groups represented");
  return total / double(classes_counted);
}

struct SubgroupAccuracy {
  int k = 1;
  std::vector<std::pair<std::string, double>> per_group;  // sorted by group name
  double max_gap = 0.0;                                   // max pairwise = max - min
  std::vector<std::string> excluded;
};

// Top-k accuracy per group plus the maximum pairwise gap. Binary tasks use
// the hard labels for k=1 (the 0.5 threshold unless thresholds were applied).
inline SubgroupAccuracy subgroup_accuracy(const PredictionSet& preds, int k,
                                          const FairnessConfig& cfg = {}) {
  if (k < 1 || k > preds.n_classes)
    fail(errc::invalid_k, "k = " + std::to_string(k) + " with " +
                              std::to_string(preds.n_classes) + " classes");
  auto groups = detail::split_groups(preds, cfg);
  if (groups.available.empty()) fail(errc::single_group, "no group reaches the minimum size");

  auto correct = [&](std::size_t i) -> bool {
    if (preds.n_classes == 2 && preds.scores.size() == 1) {
      if (k >= 2) return true;
      return preds.hard[i] == preds.labels[i];
    }
    // rank classes by (score desc, index asc); correct if the true label
    // appears in the first k
    const int truth = preds.labels[i];
    const double truth_score = preds.scores[truth][i];
    int better = 0;
    for (int c = 0; c < preds.n_classes; ++c) {
      if (c == truth) continue;
      if (preds.scores[c][i] > truth_score || (preds.scores[c][i] == truth_score && c < truth))
        ++better;
    }
    return better < k;
  };

  SubgroupAccuracy out;
  out.k = k;
  out.excluded = groups.excluded;
  double lo = 1.0, hi = 0.0;
  for (const auto& name : groups.available) {
    std::size_t ok = 0;
    for (std::size_t i : groups.rows[name])
      if (correct(i)) ++ok;
    double acc = double(ok) / double(groups.rows[name].size());
    out.per_group.emplace_back(name, acc);
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  out.max_gap = groups.available.size() >= 2 ? hi - lo : 0.0;
  return out;
}

struct EnvironmentFairness {
  double demographic_parity = 0.0;
  double equalized_odds = 0.0;
  std::vector<SubgroupAccuracy> accuracy;  // one entry per requested k
};

struct FairnessReport {
  EnvironmentFairness source;
  EnvironmentFairness target;
  // deltas are target minus source
  double demographic_parity_delta = 0.0;
  double equalized_odds_delta = 0.0;
  std::vector<std::pair<int, double>> accuracy_gap_delta;  // (k, delta)
  std::vector<std::string> warnings;
};

inline FairnessReport fairness_transfer_report(const PredictionSet& source,
                                               const PredictionSet& target,
                                               const std::vector<int>& k_list = {1},
                                               const FairnessConfig& cfg = {}) {
  if (source.n_classes != target.n_classes)
    fail(errc::incompatible_prediction_sets, "class spaces differ between environments");

  FairnessReport report;
  std::set<std::string> source_levels(source.group.begin(), source.group.end());
  std::set<std::string> target_levels(target.group.begin(), target.group.end());
  for (const auto& g : target_levels)
    if (!source_levels.count(g))
      report.warnings.push_back("group level '" + g + "' appears only in the target");
  for (const auto& g : source_levels)
    if (!target_levels.count(g))
      report.warnings.push_back("group level '" + g + "' appears only in the source");

  auto fill = [&](const PredictionSet& preds, EnvironmentFairness& env, const char* label) {
    if (preds.n_classes == 2) {
      env.demographic_parity = demographic_parity_gap(preds, cfg);
      std::vector<std::string> notes;
      env.equalized_odds = equalized_odds_gap(preds, cfg, false, &notes);
      for (auto& n : notes) report.warnings.push_back(std::string(label) + ": " + n);
    }
    for (int k : k_list) {
      env.accuracy.push_back(subgroup_accuracy(preds, k, cfg));
      for (const auto& g : env.accuracy.back().excluded)
        report.warnings.push_back(std::string(label) + ": group '" + g +
                                  "' below the minimum size, excluded");
    }
  };
  fill(source, report.source, "source");
  fill(target, report.target, "target");

  report.demographic_parity_delta = report.target.demographic_parity - report.source.demographic_parity;
  report.equalized_odds_delta = report.target.equalized_odds - report.source.equalized_odds;
  for (std::size_t i = 0; i < k_list.size(); ++i)
    report.accuracy_gap_delta.emplace_back(
        k_list[i], report.target.accuracy[i].max_gap - report.source.accuracy[i].max_gap);
  return report;
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_FAIRNESS_HPP
