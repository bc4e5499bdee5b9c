#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qlc/cycles.hpp"
#include "qlc/scenario.hpp"
#include "qlc/singular.hpp"
#include "test_support.hpp"

using namespace qlc;

namespace {

CanonicalParamsII with_trace(double beta_plus_gamma, double lambda = 0.0) {
  CanonicalParamsII p = test::gamma_only(1.0, 2.0);
  p.beta = beta_plus_gamma - 1.0;
  p.lambda = lambda;
  return p;
}

// Two nested cycles: beta + gamma = -0.9 with lambda just above the loop value.
const CanonicalParamsII kTwoCycles = with_trace(-0.9, 0.91626);

// Stability expected for the k-th cycle counted outwards from the origin.
Stability alternating(SingularKind origin, std::size_t k) {
  const bool first_stable = origin == SingularKind::UnstableFocus;
  return (k % 2 == 0) == first_stable ? Stability::Stable : Stability::Unstable;
}

SingularKind origin_kind(const CanonicalParamsII& p) {
  return classify(canonical_to_general(p), {0.0, 0.0});
}

}  // namespace

TEST_CASE("winding number of simple polygons") {
  const std::vector<Vec2> square{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  CHECK(winding_number(square, {0.0, 0.0}) == 1);
  CHECK(winding_number(square, {2.0, 0.0}) == 0);
  const std::vector<Vec2> reversed(square.rbegin(), square.rend());
  CHECK(winding_number(reversed, {0.0, 0.0}) == -1);
}

TEST_CASE("hamiltonian system has a centre annulus") {
  Section s;
  s.x_min = 0.01;
  s.x_max = 0.4;
  const auto scan = displacement_scan(hamiltonian_params(), s, 32);
  REQUIRE(scan.samples.size() == 32);
  for (const auto& d : scan.samples) {
    REQUIRE(d.present);
    CHECK(std::abs(d.dx) <= 1e-7);
  }
  const CycleSearch search = find_cycles(hamiltonian_params());
  CHECK(search.center_annulus);
  CHECK(search.cycles.empty());
}

TEST_CASE("samples are geometric and increasing") {
  const auto scan = displacement_scan(test::gamma_only(1.0, 2.0), Section{}, 16);
  REQUIRE(scan.samples.size() == 16);
  CHECK(scan.samples.front().x == doctest::Approx(1e-3));
  CHECK(scan.samples.back().x == doctest::Approx(0.95));
  for (std::size_t i = 2; i < scan.samples.size(); ++i) {
    const double r1 = scan.samples[i].x / scan.samples[i - 1].x;
    const double r0 = scan.samples[i - 1].x / scan.samples[i - 2].x;
    CHECK(r1 == doctest::Approx(r0).epsilon(1e-9));
  }
}

TEST_CASE("gamma alone: outward spiral and no cycle") {
  const auto p = test::gamma_only(1.0, 2.0);
  const auto scan = displacement_scan(p, Section{}, 32);
  for (const auto& d : scan.samples) {
    if (d.x < 0.05 && d.present) CHECK(d.dx > 0.0);
  }
  CHECK(find_cycles(p).cycles.empty());
  CHECK(count_cycles_around_origin(p).count == 0);
}

TEST_CASE("one stable cycle below the beta loop") {
  const auto p = with_trace(0.05);
  const CycleSearch search = find_cycles(p);
  REQUIRE(search.cycles.size() == 1);
  const auto& c = search.cycles[0];
  CHECK(c.stability == Stability::Stable);
  CHECK(c.multiplier < 0.0);
  CHECK(c.x == doctest::Approx(0.153311743086).epsilon(1e-8));
  CHECK(c.winding_origin == 1);
  CHECK(c.encloses_only_origin);
  CHECK(std::abs(c.residual) <= 1e-9);
  REQUIRE(!c.orbit.points.empty());
  CHECK(norm(c.orbit.points.front() - c.orbit.points.back()) <= 1e-7);
}

TEST_CASE("two nested cycles above the lambda loop") {
  const CycleSearch search = find_cycles(kTwoCycles);
  REQUIRE(search.cycles.size() == 2);
  CHECK(search.cycles[0].x == doctest::Approx(0.161839170571).epsilon(1e-8));
  CHECK(search.cycles[1].x == doctest::Approx(0.177917136705).epsilon(1e-8));
  CHECK(search.cycles[0].stability == Stability::Stable);
  CHECK(search.cycles[1].stability == Stability::Unstable);
  CHECK(search.cycles[0].period < search.cycles[1].period);

  SUBCASE("displacement changes sign exactly twice") {
    int changes = 0;
    const DisplacementSample* prev = nullptr;
    for (const auto& d : search.scan.samples) {
      if (!d.present) continue;
      if (prev && (prev->dx > 0.0) != (d.dx > 0.0)) ++changes;
      prev = &d;
    }
    CHECK(changes == 2);
  }
  SUBCASE("count agrees over grid refinement") {
    const CycleCount cc = count_cycles_around_origin(kTwoCycles);
    CHECK(cc.count == 2);
    CHECK(!cc.node_origin);
  }
}

TEST_CASE("cycle invariants: alternation, winding, halved tolerances") {
  const CanonicalParamsII cases[] = {with_trace(0.05), with_trace(0.02), kTwoCycles, with_trace(-0.9, 0.9175)};
  for (const auto& p : cases) {
    CAPTURE(p.beta);
    CAPTURE(p.lambda);
    const CycleSearch search = find_cycles(p);
    REQUIRE(!search.cycles.empty());
    const SingularKind origin = origin_kind(p);
    const ReturnMap tight(canonical_to_general(p), Section{}, IntegratorConfig{}.tightened(2.0));
    for (std::size_t k = 0; k < search.cycles.size(); ++k) {
      const auto& c = search.cycles[k];
      CHECK(c.stability == alternating(origin, k));
      CHECK(c.winding_origin == 1);
      CHECK(c.encloses_only_origin);
      if (k > 0) CHECK(c.x > search.cycles[k - 1].x);
      const auto d = tight.displacement(c.x);
      REQUIRE(d.has_value());
      CHECK(std::abs(*d) <= 1e-8);
    }
  }
}

TEST_CASE("node at the origin") {
  // trace -2.5 with unit determinant: a stable node.
  const auto p = with_trace(-0.9, -1.6);
  REQUIRE(finite_singular_points(p).size() == 2);
  CHECK_THROWS_WITH_AS(displacement_scan(p, Section{}, 32), "no surrounding cycles possible", DomainError);
  const CycleCount cc = count_cycles_around_origin(p);
  CHECK(cc.node_origin);
  CHECK(cc.count == 0);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(displacement_scan(test::gamma_only(1.0, 2.0), Section{}, 8), std::invalid_argument);
  // Four finite singular points.
  CHECK_THROWS_AS(count_cycles_around_origin(hamiltonian_params()), DomainError);
}

TEST_CASE("gamma family grows with gamma and shrinks into the focus") {
  CanonicalParamsII p = with_trace(0.02);
  p.beta = -0.95;
  p.gamma = 0.97;
  const CycleSearch start = find_cycles(p);
  REQUIRE(start.cycles.size() == 1);

  const FamilyCurve up = track_family(p, RotationParam::Gamma, start.cycles[0].x, 1.0);
  CHECK(up.termination == FamilyTermination::RangeEnd);
  REQUIRE(up.points.size() > 3);
  for (std::size_t i = 1; i < up.points.size(); ++i) CHECK(up.points[i].x > up.points[i - 1].x);
  CHECK(up.points.back().x == doctest::Approx(0.153311743086).epsilon(1e-7));

  const FamilyCurve down = track_family(p, RotationParam::Gamma, start.cycles[0].x, 0.9);
  CHECK(down.termination == FamilyTermination::ShrankToFocus);
  // The focus turns weak at gamma = -beta.
  CHECK(down.points.back().mu == doctest::Approx(0.95).epsilon(1e-4));
  CHECK(down.points.back().x < 0.01);
}

TEST_CASE("two-cycle branches in lambda meet at a fold") {
  const CycleSearch start = find_cycles(kTwoCycles);
  REQUIRE(start.cycles.size() == 2);
  StepPolicy policy;
  policy.initial_step = 1e-4;
  policy.max_step = 1e-3;
  // Stay where the system keeps exactly two singular points.
  const double b = kTwoCycles.beta + kTwoCycles.gamma;
  const double end = max_trace_two_points(kTwoCycles.c, kTwoCycles.gamma, b) - b;
  const FamilyCurve inner = track_family(kTwoCycles, RotationParam::Lambda, start.cycles[0].x, end, policy);
  const FamilyCurve outer = track_family(kTwoCycles, RotationParam::Lambda, start.cycles[1].x, end, policy);
  CHECK(inner.termination == FamilyTermination::FoldDetected);
  CHECK(outer.termination == FamilyTermination::FoldDetected);
  const double gap = std::abs(inner.points.back().x - outer.points.back().x);
  CHECK(gap < 10.0 * std::max(inner.last_step, outer.last_step));
}
