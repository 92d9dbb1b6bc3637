#ifndef SHIFTAUDIT_MITIGATION_HPP
#define SHIFTAUDIT_MITIGATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "shiftaudit/causal_graph.hpp"  // FairnessCriterion
#include "shiftaudit/errors.hpp"
#include "shiftaudit/fairness.hpp"

namespace shiftaudit {

// Reserved threshold strictly above any score; a group with this threshold
// predicts everything negative. Serialized as the value 2.
inline constexpr double kAllNegativeThreshold = 2.0;

struct GroupThresholds {
  std::map<std::string, double> thresholds;  // group level -> threshold
  FairnessCriterion criterion = FairnessCriterion::DemographicParity;
  double achieved_gap = 0.0;  // criterion gap on the fitting data
  double grid_step = 0.005;
};

namespace detail {

inline std::vector<double> threshold_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) fail(errc::invalid_spec, "grid_step must lie in (0,1]");
  std::vector<double> grid;
  for (std::size_t j = 0;; ++j) {
    double t = double(j) * step;
    if (t > 1.0 + 1e-12) break;
    grid.push_back(std::min(t, 1.0));
  }
  if (grid.back() < 1.0 - 1e-12) grid.push_back(1.0);
  return grid;
}

// Per-group, per-grid-threshold counts. Rates are monotone nonincreasing in
// the threshold index.
struct GroupStats {
  std::string name;
  std::size_t n = 0, positives_true = 0, negatives_true = 0;
  std::vector<std::size_t> predicted_pos;  // per grid index
  std::vector<std::size_t> true_pos;
  std::vector<std::size_t> correct;

  double rate(std::size_t j) const { return double(predicted_pos[j]) / double(n); }
  double tpr(std::size_t j) const { return double(true_pos[j]) / double(positives_true); }
  double fpr(std::size_t j) const {
    return double(predicted_pos[j] - true_pos[j]) / double(negatives_true);
  }
};

inline std::vector<GroupStats> group_stats(const PredictionSet& preds,
                                           const std::vector<double>& grid) {
  std::map<std::string, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < preds.size(); ++i) rows[preds.group[i]].push_back(i);

  std::vector<GroupStats> stats;
  for (const auto& [name, idx] : rows) {
    GroupStats g;
    g.name = name;
    g.n = idx.size();
    std::vector<std::pair<double, int>> sorted;  // (score, label), ascending
    sorted.reserve(idx.size());
    for (std::size_t i : idx) {
      sorted.emplace_back(preds.scores[0][i], preds.labels[i]);
      if (preds.labels[i] == 1)
        ++g.positives_true;
      else
        ++g.negatives_true;
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> ones_suffix(sorted.size() + 1, 0);
    for (std::size_t i = sorted.size(); i-- > 0;)
      ones_suffix[i] = ones_suffix[i + 1] + (sorted[i].second == 1 ? 1 : 0);

    g.predicted_pos.resize(grid.size());
    g.true_pos.resize(grid.size());
    g.correct.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      // first index with score >= t
      auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(grid[j], -1));
      std::size_t first = std::size_t(it - sorted.begin());
      g.predicted_pos[j] = sorted.size() - first;
      g.true_pos[j] = ones_suffix[first];
      std::size_t fp = g.predicted_pos[j] - g.true_pos[j];
      g.correct[j] = g.true_pos[j] + (g.negatives_true - fp);
    }
    stats.push_back(std::move(g));
  }
  return stats;
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  std::size_t total_correct = 0;
  std::vector<std::size_t> picks;  // grid index per group, group-sorted order

  bool better_than(const Candidate& other, const std::vector<double>& grid) const {
    if (objective != other.objective) return objective < other.objective;
    if (total_correct != other.total_correct) return total_correct > other.total_correct;
    for (std::size_t g = 0; g < picks.size(); ++g)
      if (grid[picks[g]] != grid[other.picks[g]]) return grid[picks[g]] < grid[other.picks[g]];
    return false;
  }
};

inline double dp_objective(const std::vector<GroupStats>& stats,
                           const std::vector<std::size_t>& picks) {
  double lo = 1.0, hi = 0.0;
  for (std::size_t g = 0; g < stats.size(); ++g) {
    double r = stats[g].rate(picks[g]);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi - lo;
}

inline double eo_objective(const std::vector<GroupStats>& stats,
                           const std::vector<std::size_t>& picks) {
  double lo_t = 1.0, hi_t = 0.0, lo_f = 1.0, hi_f = 0.0;
  for (std::size_t g = 0; g < stats.size(); ++g) {
    double t = stats[g].tpr(picks[g]);
    double f = stats[g].fpr(picks[g]);
    lo_t = std::min(lo_t, t);
    hi_t = std::max(hi_t, t);
    lo_f = std::min(lo_f, f);
    hi_f = std::max(hi_f, f);
  }
  return 0.5 * ((hi_t - lo_t) + (hi_f - lo_f));
}

inline std::size_t total_correct(const std::vector<GroupStats>& stats,
                                 const std::vector<std::size_t>& picks) {
  std::size_t c = 0;
  for (std::size_t g = 0; g < stats.size(); ++g) c += stats[g].correct[picks[g]];
  return c;
}

// Joint enumeration of every grid combination; exact including tie-breaks.
// Used for <= 3 groups, where the grid product stays small.
inline Candidate exhaustive_search(const std::vector<GroupStats>& stats,
                                   const std::vector<double>& grid, FairnessCriterion criterion) {
  const std::size_t groups = stats.size();
  std::vector<std::size_t> picks(groups, 0);
  Candidate best;
  for (;;) {
    Candidate cur;
    cur.picks = picks;
    cur.objective = criterion == FairnessCriterion::DemographicParity
                        ? dp_objective(stats, picks)
                        : eo_objective(stats, picks);
    cur.total_correct = total_correct(stats, picks);
    if (cur.better_than(best, grid)) best = cur;
    std::size_t g = 0;
    while (g < groups && ++picks[g] == grid.size()) picks[g++] = 0;
    if (g == groups) break;
  }
  return best;
}

// For larger group counts, enumerate candidate floors of the realized rates
// instead of the full product. Exact in the primary objective; the accuracy
// and lexicographic tie-breaks are applied within the optimal window.
inline Candidate decomposed_dp_search(const std::vector<GroupStats>& stats,
                                      const std::vector<double>& grid) {
  const std::size_t groups = stats.size();
  std::vector<double> floors;
  for (const auto& g : stats)
    for (std::size_t j = 0; j < grid.size(); ++j) floors.push_back(g.rate(j));
  std::sort(floors.begin(), floors.end());
  floors.erase(std::unique(floors.begin(), floors.end()), floors.end());

  double best_gap = std::numeric_limits<double>::infinity();
  for (double lo : floors) {
    double hi = 0.0, realized_lo = 1.0;
    bool feasible = true;
    for (const auto& g : stats) {
      // smallest achievable rate >= lo; rates fall as the index grows, so
      // scan from the high-threshold end
      double pick = -1.0;
      for (std::size_t j = grid.size(); j-- > 0;) {
        if (g.rate(j) >= lo - 1e-15) {
          pick = g.rate(j);
          break;
        }
      }
      if (pick < 0) {
        feasible = false;
        break;
      }
      hi = std::max(hi, pick);
      realized_lo = std::min(realized_lo, pick);
    }
    if (feasible) best_gap = std::min(best_gap, hi - realized_lo);
  }

  // accuracy + lex pass over windows of the optimal width
  Candidate best;
  for (double lo : floors) {
    std::vector<std::size_t> picks(groups);
    bool feasible = true;
    for (std::size_t g = 0; g < groups && feasible; ++g) {
      bool found = false;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double r = stats[g].rate(j);
        if (r >= lo - 1e-15 && r <= lo + best_gap + 1e-15) {
          if (!found || stats[g].correct[j] > stats[g].correct[picks[g]]) {
            picks[g] = j;
            found = true;
          }
        }
      }
      feasible = found;
    }
    if (!feasible) continue;
    Candidate cur;
    cur.picks = picks;
    cur.objective = dp_objective(stats, picks);
    cur.total_correct = total_correct(stats, picks);
    if (cur.objective <= best_gap + 1e-15 && cur.better_than(best, grid)) best = cur;
  }
  return best;
}

inline Candidate decomposed_eo_search(const std::vector<GroupStats>& stats,
                                      const std::vector<double>& grid) {
  std::vector<double> tpr_floors, fpr_floors;
  for (const auto& g : stats)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      tpr_floors.push_back(g.tpr(j));
      fpr_floors.push_back(g.fpr(j));
    }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(tpr_floors);
  dedupe(fpr_floors);

  Candidate best;
  const std::size_t groups = stats.size();
  for (double lo_t : tpr_floors) {
    for (double lo_f : fpr_floors) {
      // per group the feasible thresholds form a prefix; the largest feasible
      // index minimizes both rate contributions
      std::vector<std::size_t> picks(groups);
      bool feasible = true;
      for (std::size_t g = 0; g < groups && feasible; ++g) {
        bool found = false;
        for (std::size_t j = grid.size(); j-- > 0;) {
          if (stats[g].tpr(j) >= lo_t - 1e-15 && stats[g].fpr(j) >= lo_f - 1e-15) {
            picks[g] = j;
            found = true;
            break;
          }
        }
        feasible = found;
      }
      if (!feasible) continue;
      Candidate cur;
      cur.picks = picks;
      cur.objective = eo_objective(stats, picks);
      cur.total_correct = total_correct(stats, picks);
      if (cur.better_than(best, grid)) best = cur;
    }
  }

  // accuracy refinement inside the realized rate box; cannot worsen the
  // objective because every re-pick stays within the achieved bounds
  if (!best.picks.empty()) {
    double lo_t = 1.0, hi_t = 0.0, lo_f = 1.0, hi_f = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      lo_t = std::min(lo_t, stats[g].tpr(best.picks[g]));
      hi_t = std::max(hi_t, stats[g].tpr(best.picks[g]));
      lo_f = std::min(lo_f, stats[g].fpr(best.picks[g]));
      hi_f = std::max(hi_f, stats[g].fpr(best.picks[g]));
    }
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double t = stats[g].tpr(j), f = stats[g].fpr(j);
        if (t >= lo_t - 1e-15 && t <= hi_t + 1e-15 && f >= lo_f - 1e-15 && f <= hi_f + 1e-15 &&
            stats[g].correct[j] > stats[g].correct[best.picks[g]])
          best.picks[g] = j;
      }
    }
    best.objective = eo_objective(stats, best.picks);
    best.total_correct = total_correct(stats, best.picks);
  }
  return best;
}

}  // namespace detail

// Per-group thresholds equalizing positive-prediction rates (demographic
// parity) or TPR/FPR (equalized odds) on the calibration data, by grid
// search. Ties resolve toward higher overall accuracy, then lower thresholds
// in group-name order.
inline GroupThresholds fit_group_thresholds(const PredictionSet& calibration,
                                            FairnessCriterion criterion, double grid_step = 0.005) {
  if (calibration.n_classes != 2)
    fail(errc::invalid_spec, "threshold post-processing is defined for binary tasks");
  auto grid = detail::threshold_grid(grid_step);
  auto stats = detail::group_stats(calibration, grid);
  if (stats.size() < 2) fail(errc::single_group, "threshold fitting needs at least 2 groups");
  if (criterion == FairnessCriterion::EqualizedOdds)
    for (const auto& g : stats)
      if (g.positives_true == 0 || g.negatives_true == 0)
        fail(errc::missing_class_in_group,
             "group '" + g.name + "' lacks one of the outcome classes");

  detail::Candidate best = stats.size() <= 3
                               ? detail::exhaustive_search(stats, grid, criterion)
                               : (criterion == FairnessCriterion::DemographicParity
                                      ? detail::decomposed_dp_search(stats, grid)
                                      : detail::decomposed_eo_search(stats, grid));

  GroupThresholds out;
  out.criterion = criterion;
  out.grid_step = grid_step;
  out.achieved_gap = best.objective;
  for (std::size_t g = 0; g < stats.size(); ++g)
    out.thresholds[stats[g].name] = grid[best.picks[g]];
  return out;
}

// Hard label = 1 iff score >= the group's threshold; scores stay untouched.
inline PredictionSet apply_thresholds(PredictionSet preds, const GroupThresholds& thresholds) {
  if (preds.n_classes != 2) fail(errc::invalid_spec, "thresholds apply to binary tasks");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto it = thresholds.thresholds.find(preds.group[i]);
    if (it == thresholds.thresholds.end())
      fail(errc::unknown_group_level, "no threshold for group '" + preds.group[i] + "'");
    preds.hard[i] = preds.scores[0][i] >= it->second ? 1 : 0;
  }
  return preds;
}

struct MitigationConfig {
  double grid_step = 0.005;
  double fit_fraction = 0.5;  // share of the source set used for fitting
  std::uint64_t seed = 0;
  FairnessConfig fairness;
};

struct MitigationReport {
  FairnessCriterion criterion = FairnessCriterion::DemographicParity;
  GroupThresholds thresholds;
  double source_gap_before = 0.0;  // thresholded-rate criterion gap, source test split
  double source_gap_after = 0.0;
  double target_gap_before = 0.0;
  double target_gap_after = 0.0;
  std::size_t fit_rows = 0;
  std::size_t test_rows = 0;
};

namespace detail {

inline PredictionSet subset(const PredictionSet& preds, const std::vector<std::size_t>& rows) {
  PredictionSet out;
  out.n_classes = preds.n_classes;
  out.scores.resize(preds.scores.size());
  for (std::size_t r : rows) {
    for (std::size_t c = 0; c < preds.scores.size(); ++c)
      out.scores[c].push_back(preds.scores[c][r]);
    out.labels.push_back(preds.labels[r]);
    out.group.push_back(preds.group[r]);
    out.hard.push_back(preds.hard[r]);
  }
  return out;
}

inline double criterion_gap(const PredictionSet& preds, FairnessCriterion criterion,
                            const FairnessConfig& cfg) {
  return criterion == FairnessCriterion::DemographicParity
             ? demographic_parity_gap(preds, cfg, /*thresholded=*/true)
             : equalized_odds_gap(preds, cfg, /*thresholded=*/true);
}

}  // namespace detail

// Fit thresholds on a seeded split of the source predictions, then measure
// the criterion gap before/after on the held-out source split and on the
// target. "Before" is the incoming hard labeling (the 0.5 threshold unless
// the caller already applied one).
inline MitigationReport mitigation_transfer_experiment(const PredictionSet& source,
                                                       const PredictionSet& target,
                                                       FairnessCriterion criterion,
                                                       const MitigationConfig& config = {}) {
  if (source.n_classes != 2 || target.n_classes != 2)
    fail(errc::invalid_spec, "mitigation experiment is defined for binary tasks");
  if (!(config.fit_fraction > 0.0 && config.fit_fraction < 1.0))
    fail(errc::invalid_spec, "fit_fraction must lie in (0,1)");
  if (source.size() < 2) fail(errc::degenerate_input, "source too small to split");

  std::vector<std::size_t> rows(source.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::mt19937_64 rng(config.seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::size_t cut = static_cast<std::size_t>(config.fit_fraction * double(rows.size()));
  cut = std::clamp<std::size_t>(cut, 1, rows.size() - 1);
  std::vector<std::size_t> fit_rows(rows.begin(), rows.begin() + cut);
  std::vector<std::size_t> test_rows(rows.begin() + cut, rows.end());

  auto fit_set = detail::subset(source, fit_rows);
  auto test_set = detail::subset(source, test_rows);

  MitigationReport report;
  report.criterion = criterion;
  report.fit_rows = fit_rows.size();
  report.test_rows = test_rows.size();
  report.thresholds = fit_group_thresholds(fit_set, criterion, config.grid_step);

  report.source_gap_before = detail::criterion_gap(test_set, criterion, config.fairness);
  report.target_gap_before = detail::criterion_gap(target, criterion, config.fairness);
  auto test_after = apply_thresholds(test_set, report.thresholds);
  auto target_after = apply_thresholds(target, report.thresholds);
  report.source_gap_after = detail::criterion_gap(test_after, criterion, config.fairness);
  report.target_gap_after = detail::criterion_gap(target_after, criterion, config.fairness);
  return report;
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_MITIGATION_HPP
