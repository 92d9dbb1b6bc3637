#ifndef SHIFTAUDIT_WEIGHTING_HPP
#define SHIFTAUDIT_WEIGHTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shiftaudit/dataset.hpp"
#include "shiftaudit/errors.hpp"

namespace shiftaudit {

enum class WeightScheme { Overlap, InverseProbability };

inline const char* scheme_name(WeightScheme s) {
  return s == WeightScheme::Overlap ? "ow" : "ipw";
}

struct PropensityConfig {
  double l2 = 1e-4;
  double tol = 1e-8;
  int max_iter = 100;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t fit_cap = 10000;  // per-environment subsample cap for fitting
};

// ---------------------------------------------------------------------------
// Feature encoding: numeric columns standardized, categoricals one-hot with
// the lexicographically first level as reference. Constant columns drop out.

class FeatureEncoder {
 public:
  struct ColumnPlan {
    std::string name;
    bool categorical = false;
    double mean = 0.0;
    double sd = 1.0;
    std::vector<std::string> levels;  // levels[0] is the reference
  };

  static FeatureEncoder build(const Dataset& data, const std::vector<std::string>& columns) {
    FeatureEncoder enc;
    for (const auto& name : columns) {
      const auto& col = data.column(name);
      if (col.type == Dataset::ColumnType::Numeric) {
        double mean = 0;
        size_t n = 0;
        for (double v : col.num)
          if (!std::isnan(v)) {
            mean += v;
            ++n;
          }
        if (n == 0) {
          enc.dropped_.push_back(name);
          continue;
        }
        mean /= double(n);
        double ss = 0;
        for (double v : col.num)
          if (!std::isnan(v)) ss += (v - mean) * (v - mean);
        double sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
        if (sd <= 0.0) {
          enc.dropped_.push_back(name);  // constant column
          continue;
        }
        enc.plans_.push_back({name, false, mean, sd, {}});
      } else {
        std::set<std::string> levels;
        for (const auto& v : col.cat)
          if (!v.empty()) levels.insert(v);
        if (levels.size() < 2) {
          enc.dropped_.push_back(name);
          continue;
        }
        ColumnPlan plan;
        plan.name = name;
        plan.categorical = true;
        plan.levels.assign(levels.begin(), levels.end());
        enc.plans_.push_back(std::move(plan));
      }
    }
    enc.dim_ = 0;
    for (const auto& p : enc.plans_) enc.dim_ += p.categorical ? p.levels.size() - 1 : 1;
    return enc;
  }

  std::size_t dim() const { return dim_; }
  const std::vector<ColumnPlan>& plans() const { return plans_; }
  const std::vector<std::string>& dropped_columns() const { return dropped_; }

  // Fills `out` (size dim()); returns the number of unseen categorical levels
  // encountered, which encode as all-zero.
  int encode_row(const Dataset& data, std::size_t row, double* out) const {
    int unseen = 0;
    std::size_t k = 0;
    for (const auto& plan : plans_) {
      const auto& col = data.column(plan.name);
      if (!plan.categorical) {
        if (col.type != Dataset::ColumnType::Numeric)
          fail(errc::encoding_mismatch, "column '" + plan.name + "' was numeric at fit time");
        double v = col.num[row];
        out[k++] = std::isnan(v) ? 0.0 : (v - plan.mean) / plan.sd;
      } else {
        if (col.type != Dataset::ColumnType::Categorical)
          fail(errc::encoding_mismatch, "column '" + plan.name + "' was categorical at fit time");
        const std::string& v = col.cat[row];
        auto it = std::lower_bound(plan.levels.begin(), plan.levels.end(), v);
        bool known = it != plan.levels.end() && *it == v;
        if (!known && !v.empty()) ++unseen;
        for (std::size_t j = 1; j < plan.levels.size(); ++j)
          out[k + j - 1] = (known && *it == plan.levels[j]) ? 1.0 : 0.0;
        k += plan.levels.size() - 1;
      }
    }
    return unseen;
  }

 private:
  std::vector<ColumnPlan> plans_;
  std::vector<std::string> dropped_;
  std::size_t dim_ = 0;
};

// ---------------------------------------------------------------------------
// L2-penalized logistic regression by Newton/IRLS with step halving. The
// intercept carries no penalty, so an intercept-only model reproduces the
// base rate exactly.

struct LogisticFit {
  Eigen::VectorXd beta;  // [intercept, coefficients...]
  int iterations = 0;
  double objective = 0.0;
  bool separation_warning = false;
};

namespace detail {

inline double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
inline double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double logistic_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& beta, double l2) {
  Eigen::VectorXd eta = design * beta;
  double nll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    nll += log1pexp(eta[i]) - y[i] * eta[i];
  double penalty = 0;
  for (Eigen::Index j = 1; j < beta.size(); ++j) penalty += beta[j] * beta[j];
  return nll + 0.5 * l2 * penalty;
}

inline LogisticFit fit_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& y,
                                double l2, double tol, int max_iter) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols() + 1;
  Eigen::MatrixXd design(n, d);
  design.col(0).setOnes();
  if (features.cols() > 0) design.rightCols(features.cols()) = features;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd penalty_diag = Eigen::VectorXd::Constant(d, l2);
  penalty_diag[0] = 0.0;

  LogisticFit fit;
  double obj = logistic_objective(design, y, beta, l2);
  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(eta[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    Eigen::VectorXd grad = design.transpose() * (p - y) + penalty_diag.cwiseProduct(beta);
    Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design;
    hess.diagonal() += penalty_diag;
    Eigen::VectorXd step = hess.ldlt().solve(grad);

    double scale = 1.0;
    Eigen::VectorXd candidate = beta - step;
    double cand_obj = logistic_objective(design, y, candidate, l2);
    while (cand_obj > obj + 1e-12 && scale > 1e-6) {
      scale *= 0.5;
      candidate = beta - scale * step;
      cand_obj = logistic_objective(design, y, candidate, l2);
    }
    double delta = (candidate - beta).cwiseAbs().maxCoeff();
    beta = candidate;
    obj = cand_obj;
    fit.iterations = iter;
    if (delta < tol) break;
  }
  fit.beta = beta;
  fit.objective = obj;
  // separated data shows up as coefficients pinned far out by the penalty
  fit.separation_warning = d > 1 && beta.tail(d - 1).cwiseAbs().maxCoeff() > 10.0;
  return fit;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct PropensityDiagnostics {
  int iterations = 0;
  double final_objective = 0.0;
  double holdout_accuracy = std::numeric_limits<double>::quiet_NaN();
  bool separation_warning = false;
  bool subsampled = false;
  std::vector<std::string> dropped_columns;
  std::size_t fit_rows = 0;
};

class PropensityModel {
 public:
  PropensityModel() = default;
  PropensityModel(FeatureEncoder enc, Eigen::VectorXd beta, PropensityDiagnostics diag)
      : encoder_(std::move(enc)), beta_(std::move(beta)), diag_(std::move(diag)) {}

  const FeatureEncoder& encoder() const { return encoder_; }
  const Eigen::VectorXd& coefficients() const { return beta_; }
  const PropensityDiagnostics& diagnostics() const { return diag_; }

  // P(S = 1 | V) for one row; bumps `unseen` by the count of unknown levels.
  double score_row(const Dataset& data, std::size_t row, int* unseen = nullptr) const {
    std::vector<double> x(encoder_.dim());
    int u = encoder_.encode_row(data, row, x.data());
    if (unseen) *unseen += u;
    double eta = beta_[0];
    for (std::size_t j = 0; j < x.size(); ++j) eta += beta_[static_cast<Eigen::Index>(j + 1)] * x[j];
    return detail::sigmoid(eta);
  }

  std::vector<double> scores(const Dataset& data, int* unseen = nullptr) const {
    std::vector<double> out(data.row_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = score_row(data, i, unseen);
    return out;
  }

 private:
  FeatureEncoder encoder_;
  Eigen::VectorXd beta_;
  PropensityDiagnostics diag_;
};

// Environment classifier over the blocking-set columns of the pooled table.
// Rows are split (stratified, seeded) into a fit part and a holdout whose
// accuracy lands in the diagnostics; environments beyond `fit_cap` rows are
// subsampled for fitting.
inline PropensityModel fit_propensity(const Dataset& features, const std::vector<int>& env,
                                      const PropensityConfig& config = {}) {
  if (features.row_count() != env.size())
    fail(errc::degenerate_input, "feature rows and environment labels disagree");
  if (!(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0))
    fail(errc::invalid_spec, "holdout_fraction must lie in (0,1)");
  if (config.l2 < 0 || config.tol <= 0 || config.max_iter < 1)
    fail(errc::invalid_spec, "bad propensity configuration");

  std::vector<std::size_t> env_rows[2];
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] != 0 && env[i] != 1) fail(errc::degenerate_input, "environment labels must be 0/1");
    env_rows[env[i]].push_back(i);
  }
  if (env_rows[0].size() < 2 || env_rows[1].size() < 2)
    fail(errc::degenerate_input, "need at least 2 samples per environment");

  PropensityDiagnostics diag;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> fit_rows, holdout_rows;
  for (int s = 0; s < 2; ++s) {
    auto rows = env_rows[s];
    std::shuffle(rows.begin(), rows.end(), rng);
    if (config.fit_cap > 0 && rows.size() > config.fit_cap) {
      rows.resize(config.fit_cap);
      diag.subsampled = true;
    }
    std::size_t holdout = static_cast<std::size_t>(config.holdout_fraction * double(rows.size()));
    holdout = std::min(holdout, rows.size() - 1);  // keep the environment represented
    holdout_rows.insert(holdout_rows.end(), rows.begin(), rows.begin() + holdout);
    fit_rows.insert(fit_rows.end(), rows.begin() + holdout, rows.end());
  }

  auto encoder = FeatureEncoder::build(features, features.column_names());
  diag.dropped_columns = encoder.dropped_columns();
  diag.fit_rows = fit_rows.size();

  Eigen::MatrixXd x(fit_rows.size(), encoder.dim());
  Eigen::VectorXd y(fit_rows.size());
  std::vector<double> buf(encoder.dim());
  for (std::size_t i = 0; i < fit_rows.size(); ++i) {
    encoder.encode_row(features, fit_rows[i], buf.data());
    for (std::size_t j = 0; j < buf.size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = buf[j];
    y[static_cast<Eigen::Index>(i)] = env[fit_rows[i]];
  }

  auto fit = detail::fit_logistic(x, y, config.l2, config.tol, config.max_iter);
  diag.iterations = fit.iterations;
  diag.final_objective = fit.objective;
  diag.separation_warning = fit.separation_warning;

  PropensityModel model(encoder, fit.beta, diag);
  if (!holdout_rows.empty()) {
    std::size_t correct = 0;
    for (std::size_t row : holdout_rows) {
      double p = model.score_row(features, row);
      int pred = p >= 0.5 ? 1 : 0;
      if (pred == env[row]) ++correct;
    }
    diag.holdout_accuracy = double(correct) / double(holdout_rows.size());
    model = PropensityModel(model.encoder(), model.coefficients(), diag);
  }
  return model;
}

// ---------------------------------------------------------------------------

struct WeightVector {
  std::vector<double> weights;  // normalized within the environment
  WeightScheme scheme = WeightScheme::Overlap;
  double effective_sample_size = 0.0;  // Kish ESS of the raw weights
  int unseen_levels = 0;

  static WeightVector uniform(std::size_t n) {
    WeightVector w;
    w.weights.assign(n, n > 0 ? 1.0 / double(n) : 0.0);
    w.effective_sample_size = double(n);
    return w;
  }
};

// Weights for the rows of one environment. Overlap weights favour the region
// both environments share; inverse-probability weights target the uniform
// reference. Scores are clipped into [clip, 1-clip] before use.
inline WeightVector compute_weights(const PropensityModel& model, const Dataset& features,
                                    int env_value, WeightScheme scheme, double clip = 0.01) {
  if (env_value != 0 && env_value != 1) fail(errc::degenerate_input, "env_value must be 0 or 1");
  if (!(clip > 0.0 && clip < 0.5)) fail(errc::invalid_spec, "clip must lie in (0, 0.5)");

  WeightVector out;
  out.scheme = scheme;
  out.weights.resize(features.row_count());
  double sum = 0, sumsq = 0;
  for (std::size_t i = 0; i < features.row_count(); ++i) {
    double e = model.score_row(features, i, &out.unseen_levels);
    e = std::clamp(e, clip, 1.0 - clip);
    double raw;
    if (scheme == WeightScheme::Overlap)
      raw = env_value == 0 ? e : 1.0 - e;
    else
      raw = env_value == 0 ? 1.0 / (1.0 - e) : 1.0 / e;
    out.weights[i] = raw;
    sum += raw;
    sumsq += raw * raw;
  }
  if (sum <= 0) fail(errc::degenerate_input, "weights sum to zero");
  out.effective_sample_size = sum * sum / sumsq;
  for (double& w : out.weights) w /= sum;
  return out;
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_WEIGHTING_HPP
