#include <doctest.h>

#include <cmath>

#include "qlc/json_io.hpp"
#include "qlc/scenario.hpp"
#include "test_support.hpp"

using namespace qlc;

namespace {

const ScenarioReport& report_c2() {
  static const ScenarioReport r = run_two_cycle_construction(2.0);
  return r;
}

void check_two_cycle_report(const ScenarioReport& r) {
  CHECK(r.cycle_count == 2);
  CHECK(r.nested);
  CHECK(r.inner_stable);
  CHECK(r.outer_unstable);
  CHECK(r.enclose_only_origin);
  REQUIRE(r.stages.size() == 4);
  CHECK(r.stages[0].census.size() == 4);
  for (std::size_t k = 1; k < r.stages.size(); ++k) {
    if (r.order == ScenarioOrder::GammaBetaLambda) CHECK(r.stages[k].census.size() == 2);
  }
}

}  // namespace

TEST_CASE("c = 2 construction") {
  const ScenarioReport& r = report_c2();
  check_two_cycle_report(r);
  CHECK(std::abs(r.beta_s - -0.896483958699) <= 1e-9);
  CHECK(std::abs(r.lambda_s - 0.915264599794) <= 1e-9);
  CHECK(r.delta == 0.0025);
  CHECK(r.stages[1].origin_kind == "UnstableFocus");
  CHECK(r.stages[1].params.gamma == doctest::Approx(1.0));
  CHECK(r.stages[1].gamma_window == true);
  CHECK(r.stages[3].trace_window == true);
  REQUIRE(r.stages[2].cycles.size() == 1);
  CHECK(r.stages[2].cycles[0].stability == Stability::Stable);
  const auto& cycles = r.stages[3].cycles;
  REQUIRE(cycles.size() == 2);
  CHECK(std::abs(cycles[0].x - 0.168066508338) <= 1e-8);
  CHECK(std::abs(cycles[1].x - 0.176771060187) <= 1e-8);
}

TEST_CASE("c = 1.5 construction") {
  const ScenarioReport r = run_two_cycle_construction(1.5);
  check_two_cycle_report(r);
  CHECK(std::abs(r.lambda_s - 0.906437163916) <= 1e-9);
}

TEST_CASE("c = 1 has an empty gamma window") {
  CHECK_THROWS_AS(run_two_cycle_construction(1.0), DomainError);
}

TEST_CASE("stage orders reach the same final state") {
  for (auto order : {ScenarioOrder::BetaFirst, ScenarioOrder::GammaLambdaFirst}) {
    ScenarioConfig cfg;
    cfg.order = order;
    const ScenarioReport r = run_two_cycle_construction(2.0, cfg);
    CAPTURE(to_string(order));
    check_two_cycle_report(r);
    CHECK(r.final_params.lambda == report_c2().final_params.lambda);
    CHECK(r.final_params.beta == report_c2().final_params.beta);
  }
  CHECK(scenario_order_from_string("default") == ScenarioOrder::GammaBetaLambda);
  CHECK_THROWS_AS(scenario_order_from_string("sideways"), std::invalid_argument);
}

TEST_CASE("reports are reproducible") {
  const ScenarioReport again = run_two_cycle_construction(2.0);
  CHECK(dump_json(Json(again)) == dump_json(Json(report_c2())));
}

TEST_CASE("beta outcome changes exactly once over eight probes") {
  const auto p = test::gamma_only(1.0, 2.0);
  int flips = 0;
  std::optional<SeparatrixTag> previous;
  for (int k = 0; k < 8; ++k) {
    const double beta = -3.0 + 3.0 * (k + 0.5) / 8.0;
    const CanonicalParamsII q = with(p, RotationParam::Beta, beta);
    const auto frame = saddle_frame(canonical_to_general(q), principal_saddle(q));
    const SeparatrixTag tag = classify_unstable_separatrix(q, frame).tag;
    if (previous && *previous != tag) ++flips;
    previous = tag;
  }
  CHECK(flips == 1);
}

TEST_CASE("fold of the two-cycle pair in lambda") {
  const ScenarioReport& r = report_c2();
  const auto& cycles = r.stages[3].cycles;
  const FoldRecord f = fold_exhibit(r.final_params, cycles[0].x, cycles[1].x);
  CHECK(f.stable_branch.termination == FamilyTermination::FoldDetected);
  CHECK(f.unstable_branch.termination == FamilyTermination::FoldDetected);
  CHECK(f.lambda_fold > r.final_params.lambda);
  CHECK(f.lambda_fold - f.lambda_fold_lo <= 1e-9);
  REQUIRE(f.semistable.has_value());
  CHECK(f.semistable->stability == Stability::SemiStable);
  CHECK(std::abs(f.semistable_lambda - f.lambda_fold) <= 1e-4);
  CHECK(f.count_past_fold == 0);
  CHECK(f.slopes_opposite);
  CHECK(f.branch_gap < 10.0 * f.continuation_step);
  CHECK(f.x_fold > cycles[0].x);
  CHECK(f.x_fold < cycles[1].x);
}

TEST_CASE("fold errors carry the curves") {
  const ScenarioReport& r = report_c2();
  CHECK_THROWS_AS(fold_exhibit(r.final_params, 0.2, 0.1), DomainError);
}

TEST_CASE("grid sampling") {
  GridSpec g;
  g.n = 60;
  g.seed = 7;
  const auto pts = sample_grid(g);
  REQUIRE(pts.size() == 60);
  for (const auto& p : pts) {
    CHECK(p.nu == 1);
    CHECK(p.a == 1.0);
    CHECK(gamma_window_condition(p.c, p.gamma));
    CHECK(trace_window_condition(p.c, p.gamma, p.beta, p.lambda));
    CHECK(finite_singular_points(p).size() == 2);
  }
  const auto again = sample_grid(g);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(again[i].lambda == pts[i].lambda);

  g.n = 0;
  CHECK(sample_grid(g).empty());
}

TEST_CASE("sweeps") {
  SUBCASE("empty grid") {
    GridSpec g;
    g.n = 0;
    const SweepSummary s = sweep_max_cycles(g);
    CHECK(s.points.empty());
    CHECK(s.histogram.empty());
    CHECK(s.max_count == -1);
  }
  SUBCASE("gamma alone never creates a cycle") {
    GridSpec g;
    g.n = 40;
    g.mode = SweepMode::GammaOnly;
    const SweepSummary s = sweep_max_cycles(g);
    CHECK(s.inconclusive.empty());
    CHECK(s.max_count == 0);
  }
  SUBCASE("explicit points keep their order") {
    GridSpec g;
    g.points = std::vector<CanonicalParamsII>{report_c2().final_params, test::gamma_only(1.0, 2.0)};
    const SweepSummary s = sweep_max_cycles(g);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].count == 2);
    CHECK(s.points[1].count == 0);
    CHECK(s.max_count == 2);
    CHECK(s.histogram.at(0) == 1);
    CHECK(s.histogram.at(2) == 1);
  }
  SUBCASE("per-point errors are collected") {
    GridSpec g;
    g.points = std::vector<CanonicalParamsII>{hamiltonian_params()};
    const SweepSummary s = sweep_max_cycles(g);
    REQUIRE(s.inconclusive.size() == 1);
    CHECK(!s.points[0].error.empty());
  }
}
