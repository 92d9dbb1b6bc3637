#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "shiftaudit/synthetic.hpp"

using namespace shiftaudit;
using Catch::Approx;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  ScenarioSpec spec;
  spec.id = ScenarioId::ACd;
  spec.n_per_env = 500;
  spec.seed = 42;
  auto g1 = generate(spec);
  auto g2 = generate(spec);
  for (const auto& col : {"S", "A", "Y", "X1", "X2", "X3"}) {
    const auto& a = g1.source.numeric(col);
    const auto& b = g2.source.numeric(col);
    REQUIRE(a == b);
    REQUIRE(g1.target.numeric(col) == g2.target.numeric(col));
  }
  CHECK(format_graph_spec(g1.truth) == format_graph_spec(g2.truth));

  spec.seed = 43;
  auto g3 = generate(spec);
  CHECK(g3.source.numeric("X1") != g1.source.numeric("X1"));
}

TEST_CASE("planted demographic shift lands at the requested magnitude") {
  ScenarioSpec spec;
  spec.id = ScenarioId::ACa;
  spec.n_per_env = 10000;
  spec.seed = 7;
  auto g = generate(spec);
  double p0 = mean(g.source.numeric("A"));
  double p1 = mean(g.target.numeric("A"));
  CHECK(p0 == Approx(0.40).margin(0.02));
  CHECK(p1 - p0 == Approx(0.20).margin(0.02));
}

TEST_CASE("inactive magnitudes are forced to zero") {
  ScenarioSpec spec;
  spec.id = ScenarioId::ACb;  // only S->X is active
  spec.n_per_env = 10000;
  spec.seed = 5;
  auto m = effective_magnitudes(spec);
  CHECK(m.delta_a == 0.0);
  CHECK(m.delta_y == 0.0);
  CHECK(m.delta_x == 0.5);

  // A is sampled without reading S, so the marginals coincide up to noise
  auto g = generate(spec);
  CHECK(mean(g.source.numeric("A")) == Approx(mean(g.target.numeric("A"))).margin(0.02));
  // while X really shifts
  CHECK(mean(g.target.numeric("X1")) - mean(g.source.numeric("X1")) == Approx(0.5).margin(0.05));
}

TEST_CASE("scenario graphs carry exactly the planted S-edges") {
  auto check = [](ScenarioId id, std::vector<std::string> targets) {
    ScenarioSpec spec;
    spec.id = id;
    spec.n_per_env = 10;
    auto g = generate(spec);
    int s = g.truth.environment_index();
    std::vector<std::string> found;
    for (int c : g.truth.children(s)) found.push_back(g.truth.node(c).name);
    std::sort(found.begin(), found.end());
    std::sort(targets.begin(), targets.end());
    CHECK(found == targets);
  };
  check(ScenarioId::ACa, {"A"});
  check(ScenarioId::ACb, {"X"});
  check(ScenarioId::ACc, {"Y"});
  check(ScenarioId::ACd, {"A", "X", "Y"});
  check(ScenarioId::Ca, {"A"});
  check(ScenarioId::Cb, {"X"});
  check(ScenarioId::Cc, {"Y"});
  check(ScenarioId::Cd, {"A", "X", "Y"});
}

TEST_CASE("scenario graphs reproduce the boxed independences of the figures") {
  auto graph_of = [](ScenarioId id) {
    ScenarioSpec spec;
    spec.id = id;
    spec.n_per_env = 10;
    return generate(spec).truth;
  };

  // anti-causal (a): X indep S | A; X indep S | A,Y; Y indep S | A
  auto aca = graph_of(ScenarioId::ACa);
  CHECK(d_separated(aca, "X", "S", {"A"}));
  CHECK(d_separated(aca, "X", "S", {"A", "Y"}));
  CHECK(d_separated(aca, "Y", "S", {"A"}));

  // anti-causal (b): A indep S; Y indep S
  auto acb = graph_of(ScenarioId::ACb);
  CHECK(d_separated(acb, "A", "S", {}));
  CHECK(d_separated(acb, "Y", "S", {}));

  // anti-causal (c): A indep S; conditioning on Y alone re-opens the collider
  // path through A, so the faithful statement conditions on {Y, A}
  auto acc = graph_of(ScenarioId::ACc);
  CHECK(d_separated(acc, "A", "S", {}));
  CHECK_FALSE(d_separated(acc, "X", "S", {"Y"}));
  CHECK(d_separated(acc, "X", "S", {"Y", "A"}));

  // causal (a): X indep S | A; Y indep S | A; Y indep S | A,X
  auto ca = graph_of(ScenarioId::Ca);
  CHECK(d_separated(ca, "X", "S", {"A"}));
  CHECK(d_separated(ca, "Y", "S", {"A"}));
  CHECK(d_separated(ca, "Y", "S", {"A", "X"}));

  // causal (b): A indep S; conditioning on X alone re-opens the collider
  // path through A, so Y needs {X, A}
  auto cb = graph_of(ScenarioId::Cb);
  CHECK(d_separated(cb, "A", "S", {}));
  CHECK_FALSE(d_separated(cb, "Y", "S", {"X"}));
  CHECK(d_separated(cb, "Y", "S", {"X", "A"}));

  // causal (c): A indep S; X indep S
  auto cc = graph_of(ScenarioId::Cc);
  CHECK(d_separated(cc, "A", "S", {}));
  CHECK(d_separated(cc, "X", "S", {}));
}

TEST_CASE("invalid specs are rejected") {
  auto expect_invalid = [](ScenarioSpec spec) {
    try {
      (void)generate(spec);
      FAIL("expected InvalidSpec");
    } catch (const audit_error& e) {
      CHECK(e.code() == errc::invalid_spec);
    }
  };
  ScenarioSpec zero;
  zero.n_per_env = 0;
  expect_invalid(zero);

  ScenarioSpec bad_p;
  bad_p.params.p_a = 1.2;
  expect_invalid(bad_p);

  ScenarioSpec overflow;
  overflow.id = ScenarioId::ACa;
  overflow.params.p_a = 0.9;
  overflow.magnitudes.delta_a = 0.2;
  expect_invalid(overflow);

  ScenarioSpec thin_compound;
  thin_compound.id = ScenarioId::Cd;
  thin_compound.magnitudes = {0.2, 0.0, 0.0};
  expect_invalid(thin_compound);
}

TEST_CASE("dermatology-style generator hides columns on request") {
  DermSpec spec;
  spec.n_per_env = 200;
  spec.seed = 9;
  spec.hide_m_in_target = true;
  auto g = generate_dermatology_style(spec);
  CHECK(g.source.has_column("M"));
  CHECK_FALSE(g.target.has_column("M"));
  CHECK(g.target.has_column("X_s"));
  CHECK_FALSE(g.truth.node(g.truth.index_of("M")).observed);

  // with every S-edge active the graph carries all five
  int s = g.truth.environment_index();
  CHECK(g.truth.children(s).size() == 5);
}
