#include <doctest.h>

#include <cmath>

#include "qlc/isocline.hpp"
#include "test_support.hpp"

using namespace qlc;

namespace {

bool same_line(const Line& a, const Line& b, double tol) {
  // Both are normalised, so a sign flip is already canonicalised away.
  return std::abs(a.normal.x - b.normal.x) <= tol && std::abs(a.normal.y - b.normal.y) <= tol &&
         std::abs(a.offset - b.offset) <= tol;
}

Line unit_line(Vec2 n, double off) {
  const double len = norm(n);
  Line l{(1.0 / len) * n, off / len};
  if (l.normal.x < 0.0 || (l.normal.x == 0.0 && l.normal.y < 0.0)) {
    l.normal = -1.0 * l.normal;
    l.offset = -l.offset;
  }
  return l;
}

ConicCurve product(Vec2 n1, double o1, Vec2 n2, double o2, double scale) {
  // scale (n1.p - o1)(n2.p - o2)
  ConicCurve c;
  auto& k = c.coeffs;
  k[k1] = scale * o1 * o2;
  k[kX] = -scale * (o1 * n2.x + o2 * n1.x);
  k[kY] = -scale * (o1 * n2.y + o2 * n1.y);
  k[kXX] = scale * n1.x * n2.x;
  k[kXY] = scale * (n1.x * n2.y + n1.y * n2.x);
  k[kYY] = scale * n1.y * n2.y;
  return c;
}

bool lines_match(std::vector<Line> got, std::vector<Line> want, double tol) {
  if (got.size() != want.size()) return false;
  for (const Line& w : want) {
    bool found = false;
    for (const Line& g : got) found = found || same_line(g, w, tol);
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("nullcline conics are the field components verbatim") {
  const auto ham = canonical_to_general(hamiltonian_params());
  const auto pair = nullcline_conics(ham);
  CHECK(pair.vertical.coeffs == ham.a);
  CHECK(pair.horizontal.coeffs == ham.b);
  CHECK(pair.vertical.coeffs[kY] == -1.0);
  CHECK(pair.vertical.coeffs[kYY] == -1.0);
  CHECK(pair.horizontal.coeffs[kX] == 1.0);
  CHECK(pair.horizontal.coeffs[kXX] == 1.0);

  CanonicalParamsII linear = hamiltonian_params();
  linear.nu = 0;
  const auto v0 = nullcline_conics(canonical_to_general(linear)).vertical;
  CHECK(v0.coeffs[kY] == -1.0);
  CHECK(v0.coeffs[kYY] == 0.0);
  CHECK(classify_conic(v0).tag == IsoclineTag::SingleLine);
}

TEST_CASE("classify the defining nullclines") {
  SUBCASE("-y - y^2") {
    ConicCurve c;
    c.coeffs[kY] = -1.0;
    c.coeffs[kYY] = -1.0;
    const auto cls = classify_conic(c);
    REQUIRE(cls.tag == IsoclineTag::TwoParallelLines);
    CHECK(lines_match(cls.lines, {Line{{0.0, 1.0}, 0.0}, Line{{0.0, 1.0}, -1.0}}, 1e-12));
  }
  SUBCASE("x + x^2") {
    ConicCurve c;
    c.coeffs[kX] = 1.0;
    c.coeffs[kXX] = 1.0;
    const auto cls = classify_conic(c);
    REQUIRE(cls.tag == IsoclineTag::TwoParallelLines);
    CHECK(lines_match(cls.lines, {Line{{1.0, 0.0}, 0.0}, Line{{1.0, 0.0}, -1.0}}, 1e-12));
  }
  SUBCASE("xy") {
    ConicCurve c;
    c.coeffs[kXY] = 1.0;
    const auto cls = classify_conic(c);
    REQUIRE(cls.tag == IsoclineTag::TwoIntersectingLines);
    CHECK(lines_match(cls.lines, {Line{{1.0, 0.0}, 0.0}, Line{{0.0, 1.0}, 0.0}}, 1e-12));
  }
  SUBCASE("x^2 + y^2 + 1") {
    ConicCurve c;
    c.coeffs[k1] = 1.0;
    c.coeffs[kXX] = 1.0;
    c.coeffs[kYY] = 1.0;
    CHECK(classify_conic(c).tag == IsoclineTag::IrreducibleConic);
  }
  SUBCASE("x^2 + y^2 is a real point") {
    ConicCurve c;
    c.coeffs[kXX] = 1.0;
    c.coeffs[kYY] = 1.0;
    CHECK(classify_conic(c).tag == IsoclineTag::IrreducibleConic);
  }
  SUBCASE("(x - y + 1)^2") {
    const auto cls = classify_conic(product({1, -1}, -1, {1, -1}, -1, 3.0));
    REQUIRE(cls.tag == IsoclineTag::DoubleLine);
    CHECK(lines_match(cls.lines, {unit_line({1, -1}, -1)}, 1e-12));
  }
  SUBCASE("y^2 + 1 has no real points") {
    ConicCurve c;
    c.coeffs[k1] = 1.0;
    c.coeffs[kYY] = 1.0;
    CHECK(classify_conic(c).tag == IsoclineTag::IrreducibleConic);
  }
  SUBCASE("parabola") {
    ConicCurve c;
    c.coeffs[kX] = 1.0;
    c.coeffs[kYY] = 1.0;
    CHECK(classify_conic(c).tag == IsoclineTag::IrreducibleConic);
  }
  SUBCASE("degenerate inputs") {
    CHECK(classify_conic(ConicCurve{}).tag == IsoclineTag::EmptyOrWholePlane);
    ConicCurve constant;
    constant.coeffs[k1] = 2.0;
    CHECK(classify_conic(constant).tag == IsoclineTag::EmptyOrWholePlane);
    ConicCurve line;
    line.coeffs[k1] = 1.0;
    line.coeffs[kX] = 2.0;
    const auto cls = classify_conic(line);
    REQUIRE(cls.tag == IsoclineTag::SingleLine);
    CHECK(lines_match(cls.lines, {unit_line({2, 0}, -1)}, 1e-12));
  }
}

TEST_CASE("vertical nullcline is two parallel lines for every parameter value") {
  for (int i = 0; i < 200; ++i) {
    auto p = test::random_params();
    p.nu = 1;
    const auto cls = classify_conic(nullcline_conics(canonical_to_general(p)).vertical);
    REQUIRE(cls.tag == IsoclineTag::TwoParallelLines);
    CHECK(lines_match(cls.lines, {Line{{0.0, 1.0}, 0.0}, Line{{0.0, 1.0}, -1.0}}, 1e-12));
  }
}

TEST_CASE("round trip of random line pairs") {
  for (int i = 0; i < 500; ++i) {
    const double theta1 = test::uniform(0.0, 2.0 * M_PI);
    const Vec2 n1{std::cos(theta1), std::sin(theta1)};
    const double o1 = test::uniform(-2.0, 2.0);
    const double scale = test::uniform(0.2, 5.0) * (i % 2 ? 1.0 : -1.0);
    const bool parallel = i % 3 == 0;
    Vec2 n2;
    double o2;
    if (parallel) {
      n2 = (i % 4 == 0 ? -1.0 : 1.0) * n1;
      o2 = o1 + (i % 4 == 0 ? -1.0 : 1.0) * test::uniform(0.1, 2.0) * (i % 5 == 0 ? -1.0 : 1.0);
      if (i % 4 == 0) o2 = -o2;
    } else {
      const double theta2 = theta1 + test::uniform(0.2, M_PI - 0.2);
      n2 = {std::cos(theta2), std::sin(theta2)};
      o2 = test::uniform(-2.0, 2.0);
    }
    const ConicCurve conic = product(n1, o1, n2, o2, scale);
    const auto cls = classify_conic(conic);
    const IsoclineTag want = parallel ? IsoclineTag::TwoParallelLines : IsoclineTag::TwoIntersectingLines;
    INFO("sample " << i);
    REQUIRE(cls.tag == want);
    CHECK(lines_match(cls.lines, {unit_line(n1, o1), unit_line(n2, o2)}, 1e-8));
    const ConicCurve back = expand(cls);
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(back.coeffs[k] - conic.coeffs[k]) <= 1e-10);
    if (parallel) {
      CHECK(std::abs(cross(cls.lines[0].normal, cls.lines[1].normal)) <= 1e-12);
    }
  }
}
