#ifndef SHIFTAUDIT_STATS_HPP
#define SHIFTAUDIT_STATS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "shiftaudit/errors.hpp"
#include "shiftaudit/weighting.hpp"

namespace shiftaudit {

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::array<double, 2> means{0.0, 0.0};
  std::array<double, 2> ess{0.0, 0.0};
};

// Two-sided Welch t-test on weighted samples. Weighted variances carry the
// Kish effective sample size both in the Bessel-style correction and in the
// Welch-Satterthwaite degrees of freedom, the usual survey treatment.
inline TestResult weighted_welch_ttest(std::span<const double> x0, const WeightVector& w0,
                                       std::span<const double> x1, const WeightVector& w1) {
  if (x0.size() != w0.weights.size() || x1.size() != w1.weights.size())
    fail(errc::degenerate_input, "samples and weights differ in length");
  const double n_eff0 = w0.effective_sample_size;
  const double n_eff1 = w1.effective_sample_size;
  if (!(n_eff0 > 1.0) || !(n_eff1 > 1.0))
    fail(errc::insufficient_effective_samples, "need effective sample size > 1 on both sides");

  auto weighted_mean = [](std::span<const double> x, const std::vector<double>& w) {
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * x[i];
    return m;
  };
  auto weighted_var = [](std::span<const double> x, const std::vector<double>& w, double m,
                         double n_eff) {
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (x[i] - m) * (x[i] - m);
    return v * n_eff / (n_eff - 1.0);
  };

  TestResult r;
  r.ess = {n_eff0, n_eff1};
  const double m0 = weighted_mean(x0, w0.weights);
  const double m1 = weighted_mean(x1, w1.weights);
  r.means = {m0, m1};
  const double v0 = weighted_var(x0, w0.weights, m0, n_eff0);
  const double v1 = weighted_var(x1, w1.weights, m1, n_eff1);

  const double r0 = v0 / n_eff0;
  const double r1 = v1 / n_eff1;
  if (r0 + r1 <= 0.0) {
    // both sides degenerate: equal means are a non-result, unequal certain
    const double scale = std::max({1.0, std::fabs(m0), std::fabs(m1)});
    const bool equal = std::fabs(m0 - m1) <= 1e-12 * scale;
    r.statistic = equal ? 0.0
                        : (m0 > m1 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity());
    r.df = std::max(n_eff0 + n_eff1 - 2.0, 1.0);
    r.p_value = equal ? 1.0 : 0.0;
    return r;
  }

  r.statistic = (m0 - m1) / std::sqrt(r0 + r1);
  double denom = 0.0;
  if (v0 > 0) denom += r0 * r0 / (n_eff0 - 1.0);
  if (v1 > 0) denom += r1 * r1 / (n_eff1 - 1.0);
  r.df = (r0 + r1) * (r0 + r1) / denom;
  boost::math::students_t_distribution<double> dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(r.statistic));
  return r;
}

// decision_i = (p_i < alpha / k)
inline std::vector<bool> bonferroni(const std::vector<double>& p_values, double alpha) {
  if (p_values.empty()) fail(errc::empty_input, "no p-values to correct");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(errc::invalid_spec, "alpha must lie in (0,1)");
  const double threshold = alpha / double(p_values.size());
  std::vector<bool> out(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (p_values[i] < 0.0 || p_values[i] > 1.0)
      fail(errc::invalid_spec, "p-value outside [0,1]");
    out[i] = p_values[i] < threshold;
  }
  return out;
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_STATS_HPP
