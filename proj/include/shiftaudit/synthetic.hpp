#ifndef SHIFTAUDIT_SYNTHETIC_HPP
#define SHIFTAUDIT_SYNTHETIC_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shiftaudit/causal_graph.hpp"
#include "shiftaudit/dataset.hpp"
#include "shiftaudit/errors.hpp"

namespace shiftaudit {

// Scenario ids follow the two families of scenario graphs: anti-causal
// (Y -> X) and causal (X -> Y), each under demographic (a), covariate (b),
// label (c) or compound (d) shift.
enum class ScenarioId { ACa, ACb, ACc, ACd, Ca, Cb, Cc, Cd };

inline const char* scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::ACa: return "AC-a";
    case ScenarioId::ACb: return "AC-b";
    case ScenarioId::ACc: return "AC-c";
    case ScenarioId::ACd: return "AC-d";
    case ScenarioId::Ca: return "C-a";
    case ScenarioId::Cb: return "C-b";
    case ScenarioId::Cc: return "C-c";
    case ScenarioId::Cd: return "C-d";
  }
  return "?";
}

inline ScenarioId scenario_from_name(const std::string& s) {
  for (ScenarioId id : {ScenarioId::ACa, ScenarioId::ACb, ScenarioId::ACc, ScenarioId::ACd,
                        ScenarioId::Ca, ScenarioId::Cb, ScenarioId::Cc, ScenarioId::Cd})
    if (s == scenario_name(id)) return id;
  fail(errc::invalid_spec, "unknown scenario id '" + s + "'");
}

inline bool scenario_anti_causal(ScenarioId id) {
  return id == ScenarioId::ACa || id == ScenarioId::ACb || id == ScenarioId::ACc ||
         id == ScenarioId::ACd;
}

struct ShiftMagnitudes {
  double delta_a = 0.2;  // additive change in P(A = 1)
  double delta_x = 0.5;  // additive mean shift on every X dimension, noise-SD units
  double delta_y = 0.8;  // additive shift on the outcome logit
};

// All functional forms and coefficients below are tool defaults, exposed so
// experiments can move them.
struct ScenarioParams {
  double p_a = 0.4;
  double b0 = -0.5;
  double b1 = 1.0;
  std::array<double, 3> mu_y{1.0, 0.5, 0.0};
  std::array<double, 3> mu_a{0.5, 0.0, 0.5};
  std::array<double, 3> w{0.8, 0.4, 0.0};
};

struct ScenarioSpec {
  ScenarioId id = ScenarioId::ACa;
  std::size_t n_per_env = 5000;
  std::uint64_t seed = 0;
  ShiftMagnitudes magnitudes;
  ScenarioParams params;
};

struct GeneratedData {
  Dataset source;
  Dataset target;
  CausalGraph truth;
};

namespace detail {

inline double sigmoid_d(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ActiveEdges {
  bool a = false, x = false, y = false;
};

inline ActiveEdges scenario_edges(ScenarioId id) {
  switch (id) {
    case ScenarioId::ACa:
    case ScenarioId::Ca: return {true, false, false};
    case ScenarioId::ACb:
    case ScenarioId::Cb: return {false, true, false};
    case ScenarioId::ACc:
    case ScenarioId::Cc: return {false, false, true};
    case ScenarioId::ACd:
    case ScenarioId::Cd: return {true, true, true};
  }
  return {};
}

}  // namespace detail

// Effective magnitudes after forcing edges absent from the scenario to zero.
inline ShiftMagnitudes effective_magnitudes(const ScenarioSpec& spec) {
  auto active = detail::scenario_edges(spec.id);
  ShiftMagnitudes m = spec.magnitudes;
  if (!active.a) m.delta_a = 0.0;
  if (!active.x) m.delta_x = 0.0;
  if (!active.y) m.delta_y = 0.0;
  return m;
}

inline void validate(const ScenarioSpec& spec) {
  if (spec.n_per_env == 0) fail(errc::invalid_spec, "n_per_env must be positive");
  if (!(spec.params.p_a > 0.0 && spec.params.p_a < 1.0))
    fail(errc::invalid_spec, "p_a must lie in (0,1)");
  auto m = effective_magnitudes(spec);
  double shifted = spec.params.p_a + m.delta_a;
  if (!(shifted > 0.0 && shifted < 1.0))
    fail(errc::invalid_spec, "p_a + delta_a leaves (0,1)");
  auto active = detail::scenario_edges(spec.id);
  if (active.a && active.x && active.y) {
    int nonzero = (m.delta_a != 0.0) + (m.delta_x != 0.0) + (m.delta_y != 0.0);
    if (nonzero < 2) fail(errc::invalid_spec, "compound scenarios need >= 2 nonzero magnitudes");
  }
}

// S-edges are marked where the scenario actually moves something: an edge
// with a zero effective magnitude is vacuous and stays out of the graph.
inline CausalGraph scenario_graph(const ScenarioSpec& spec) {
  auto m = effective_magnitudes(spec);
  std::vector<std::pair<std::string, std::string>> edges;
  if (scenario_anti_causal(spec.id)) {
    edges = {{"A", "Y"}, {"A", "X"}, {"Y", "X"}};
  } else {
    edges = {{"A", "X"}, {"A", "Y"}, {"X", "Y"}};
  }
  if (m.delta_a != 0.0) edges.emplace_back("S", "A");
  if (m.delta_x != 0.0) edges.emplace_back("S", "X");
  if (m.delta_y != 0.0) edges.emplace_back("S", "Y");
  return build_graph({{"S", NodeRole::Environment},
                      {"A", NodeRole::Attribute},
                      {"Y", NodeRole::Outcome},
                      {"X", NodeRole::Covariate}},
                     edges);
}

// Ancestral sampling of one environment block; S is constant within it.
// Anti-causal: A -> Y -> X; causal: A -> X -> Y, with the environment adding
// the scenario's planted terms.
inline Dataset sample_environment(const ScenarioSpec& spec, int s, std::mt19937_64& rng) {
  const auto m = effective_magnitudes(spec);
  const auto& p = spec.params;
  const std::size_t n = spec.n_per_env;
  const bool anti = scenario_anti_causal(spec.id);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> col_s(n, double(s)), col_a(n), col_y(n);
  std::array<std::vector<double>, 3> col_x;
  for (auto& c : col_x) c.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double a = unif(rng) < p.p_a + s * m.delta_a ? 1.0 : 0.0;
    double y;
    std::array<double, 3> x;
    if (anti) {
      y = unif(rng) < detail::sigmoid_d(p.b0 + p.b1 * a + s * m.delta_y) ? 1.0 : 0.0;
      for (int d = 0; d < 3; ++d)
        x[d] = p.mu_y[d] * y + p.mu_a[d] * a + s * m.delta_x + gauss(rng);
    } else {
      for (int d = 0; d < 3; ++d) x[d] = p.mu_a[d] * a + s * m.delta_x + gauss(rng);
      double eta = p.b0 + p.b1 * a + s * m.delta_y;
      for (int d = 0; d < 3; ++d) eta += p.w[d] * x[d];
      y = unif(rng) < detail::sigmoid_d(eta) ? 1.0 : 0.0;
    }
    col_a[i] = a;
    col_y[i] = y;
    for (int d = 0; d < 3; ++d) col_x[d][i] = x[d];
  }

  Dataset out;
  out.add_numeric("S", std::move(col_s));
  out.add_numeric("A", std::move(col_a));
  out.add_numeric("Y", std::move(col_y));
  out.add_numeric("X1", std::move(col_x[0]));
  out.add_numeric("X2", std::move(col_x[1]));
  out.add_numeric("X3", std::move(col_x[2]));
  return out;
}

inline GeneratedData generate(const ScenarioSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  GeneratedData out{sample_environment(spec, 0, rng), sample_environment(spec, 1, rng),
                    scenario_graph(spec)};
  return out;
}

// ---------------------------------------------------------------------------
// Extended graph in the style of the teledermatology application:
// S -> {A, M, X_s, Y, X}, A -> {M, Y, X}, M -> Y, Y -> {X, X_s}. M plays the
// role of medical history, X_s of reported symptoms; both binary.

struct DermMagnitudes {
  double delta_a = 0.2;
  double delta_m = 0.6;
  double delta_xs = 0.6;
  double delta_y = 0.8;
  double delta_x = 0.5;
};

struct DermParams {
  double p_a = 0.4;
  double m0 = -0.8, m1 = 0.8;             // M logit: m0 + m1*A
  double b0 = -0.5, b1 = 1.0, b2 = 0.8;   // Y logit: b0 + b1*A + b2*M
  double xs0 = -1.0, xs1 = 1.5;           // X_s logit: xs0 + xs1*Y
  std::array<double, 3> mu_y{1.0, 0.5, 0.0};
  std::array<double, 3> mu_a{0.5, 0.0, 0.5};
};

struct DermSpec {
  std::size_t n_per_env = 5000;
  std::uint64_t seed = 0;
  DermMagnitudes magnitudes;
  DermParams params;
  bool hide_m_in_target = false;   // mark M unobserved and drop its target column
  bool hide_xs_in_target = false;  // same for X_s
};

inline CausalGraph dermatology_graph(const DermSpec& spec) {
  std::vector<std::pair<std::string, std::string>> edges = {
      {"A", "M"}, {"A", "Y"}, {"A", "X"}, {"M", "Y"}, {"Y", "X"}, {"Y", "X_s"}};
  const auto& m = spec.magnitudes;
  if (m.delta_a != 0.0) edges.emplace_back("S", "A");
  if (m.delta_m != 0.0) edges.emplace_back("S", "M");
  if (m.delta_xs != 0.0) edges.emplace_back("S", "X_s");
  if (m.delta_y != 0.0) edges.emplace_back("S", "Y");
  if (m.delta_x != 0.0) edges.emplace_back("S", "X");
  return build_graph({{"S", NodeRole::Environment},
                      {"A", NodeRole::Attribute},
                      {"M", NodeRole::Auxiliary, !spec.hide_m_in_target},
                      {"X_s", NodeRole::Auxiliary, !spec.hide_xs_in_target},
                      {"Y", NodeRole::Outcome},
                      {"X", NodeRole::Covariate}},
                     edges);
}

inline Dataset sample_derm_environment(const DermSpec& spec, int s, std::mt19937_64& rng) {
  const auto& m = spec.magnitudes;
  const auto& p = spec.params;
  const std::size_t n = spec.n_per_env;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> col_s(n, double(s)), col_a(n), col_m(n), col_y(n), col_xs(n);
  std::array<std::vector<double>, 3> col_x;
  for (auto& c : col_x) c.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double a = unif(rng) < p.p_a + s * m.delta_a ? 1.0 : 0.0;
    const double mm = unif(rng) < detail::sigmoid_d(p.m0 + p.m1 * a + s * m.delta_m) ? 1.0 : 0.0;
    const double y =
        unif(rng) < detail::sigmoid_d(p.b0 + p.b1 * a + p.b2 * mm + s * m.delta_y) ? 1.0 : 0.0;
    const double xs = unif(rng) < detail::sigmoid_d(p.xs0 + p.xs1 * y + s * m.delta_xs) ? 1.0 : 0.0;
    col_a[i] = a;
    col_m[i] = mm;
    col_y[i] = y;
    col_xs[i] = xs;
    for (int d = 0; d < 3; ++d)
      col_x[d][i] = p.mu_y[d] * y + p.mu_a[d] * a + s * m.delta_x + gauss(rng);
  }

  Dataset out;
  out.add_numeric("S", std::move(col_s));
  out.add_numeric("A", std::move(col_a));
  const bool keep_m = s == 0 || !spec.hide_m_in_target;
  const bool keep_xs = s == 0 || !spec.hide_xs_in_target;
  if (keep_m) out.add_numeric("M", std::move(col_m));
  if (keep_xs) out.add_numeric("X_s", std::move(col_xs));
  out.add_numeric("Y", std::move(col_y));
  out.add_numeric("X1", std::move(col_x[0]));
  out.add_numeric("X2", std::move(col_x[1]));
  out.add_numeric("X3", std::move(col_x[2]));
  return out;
}

inline GeneratedData generate_dermatology_style(const DermSpec& spec) {
  if (spec.n_per_env == 0) fail(errc::invalid_spec, "n_per_env must be positive");
  if (!(spec.params.p_a > 0.0 && spec.params.p_a < 1.0))
    fail(errc::invalid_spec, "p_a must lie in (0,1)");
  double shifted = spec.params.p_a + spec.magnitudes.delta_a;
  if (!(shifted > 0.0 && shifted < 1.0)) fail(errc::invalid_spec, "p_a + delta_a leaves (0,1)");
  std::mt19937_64 rng(spec.seed);
  GeneratedData out{sample_derm_environment(spec, 0, rng), sample_derm_environment(spec, 1, rng),
                    dermatology_graph(spec)};
  return out;
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_SYNTHETIC_HPP
