#include "qlc/isocline.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace qlc {

double ConicCurve::operator()(Vec2 p) const {
  const auto& k = coeffs;
  return k[k1] + k[kX] * p.x + k[kY] * p.y + k[kXX] * p.x * p.x + k[kXY] * p.x * p.y +
         k[kYY] * p.y * p.y;
}

bool ConicCurve::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v == 0.0; });
}

std::string_view to_string(IsoclineTag tag) {
  switch (tag) {
    case IsoclineTag::TwoParallelLines: return "TwoParallelLines";
    case IsoclineTag::TwoIntersectingLines: return "TwoIntersectingLines";
    case IsoclineTag::DoubleLine: return "DoubleLine";
    case IsoclineTag::SingleLine: return "SingleLine";
    case IsoclineTag::IrreducibleConic: return "IrreducibleConic";
    case IsoclineTag::EmptyOrWholePlane: return "EmptyOrWholePlane";
  }
  return "?";
}

NullclinePair nullcline_conics(const QuadraticCoefficients& system) {
  return {ConicCurve{system.a}, ConicCurve{system.b}};
}

namespace {

constexpr double kDegenerateTol = 1e-10;

struct RawLine {
  Vec2 normal;  // not normalised
  double offset;
};

// Normalises a line and returns the factor by which the linear form was divided
// (negative when the orientation was flipped).
double normalise(RawLine raw, Line& out) {
  double len = norm(raw.normal);
  Vec2 n = (1.0 / len) * raw.normal;
  double off = raw.offset / len;
  if (std::abs(n.x) < 1e-15) n.x = 0.0;
  if (std::abs(n.y) < 1e-15) n.y = 0.0;
  if (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)) {
    n = -1.0 * n;
    off = -off;
    len = -len;
  }
  out = Line{n, off};
  return len;
}

void sort_lines(std::vector<Line>& lines) {
  std::sort(lines.begin(), lines.end(), [](const Line& l, const Line& r) {
    return std::tie(l.normal.x, l.normal.y, l.offset) < std::tie(r.normal.x, r.normal.y, r.offset);
  });
}

IsoclineClass make_pair(IsoclineTag tag, RawLine l1, RawLine l2, double scale) {
  IsoclineClass out;
  out.tag = tag;
  out.lines.resize(2);
  scale *= normalise(l1, out.lines[0]);
  scale *= normalise(l2, out.lines[1]);
  out.scale = scale;
  sort_lines(out.lines);
  return out;
}

}  // namespace

IsoclineClass classify_conic(const ConicCurve& conic) {
  double m = 0.0;
  for (double v : conic.coeffs) m = std::max(m, std::abs(v));
  if (m == 0.0) return {IsoclineTag::EmptyOrWholePlane, {}, 0.0};

  std::array<double, 6> k;
  for (std::size_t i = 0; i < 6; ++i) k[i] = conic.coeffs[i] / m;

  const bool no_quadratic = k[kXX] == 0.0 && k[kXY] == 0.0 && k[kYY] == 0.0;
  if (no_quadratic) {
    if (k[kX] == 0.0 && k[kY] == 0.0) return {IsoclineTag::EmptyOrWholePlane, {}, 0.0};
    IsoclineClass out;
    out.tag = IsoclineTag::SingleLine;
    out.lines.resize(1);
    out.scale = m * normalise({{k[kX], k[kY]}, -k[k1]}, out.lines[0]);
    return out;
  }

  // Extended symmetric matrix of the conic.
  const double A = k[kXX], B = k[kXY] / 2.0, C = k[kYY];
  const double D = k[kX] / 2.0, E = k[kY] / 2.0, F = k[k1];
  const double det3 = A * (C * F - E * E) - B * (B * F - E * D) + D * (B * E - C * D);
  if (std::abs(det3) >= kDegenerateTol) return {IsoclineTag::IrreducibleConic, {}, 0.0};

  const double disc = k[kXY] * k[kXY] - 4.0 * k[kXX] * k[kYY];
  if (disc > kDegenerateTol) {
    // Two real lines through the centre where the gradient vanishes.
    const double det2 = 4.0 * A * C - k[kXY] * k[kXY];
    const Vec2 centre{(-k[kX] * 2.0 * C + k[kXY] * k[kY]) / det2,
                      (-2.0 * A * k[kY] + k[kXY] * k[kX]) / det2};
    RawLine l1, l2;
    double lead;
    const double sq = std::sqrt(disc);
    if (A == 0.0 && C == 0.0) {
      l1.normal = {1.0, 0.0};
      l2.normal = {0.0, 1.0};
      lead = k[kXY];
    } else if (std::abs(A) >= std::abs(C)) {
      // A (x - r1 y)(x - r2 y)
      const double r1 = (-k[kXY] + sq) / (2.0 * A);
      const double r2 = (-k[kXY] - sq) / (2.0 * A);
      l1.normal = {1.0, -r1};
      l2.normal = {1.0, -r2};
      lead = A;
    } else {
      // C (y - t1 x)(y - t2 x)
      const double t1 = (-k[kXY] + sq) / (2.0 * C);
      const double t2 = (-k[kXY] - sq) / (2.0 * C);
      l1.normal = {-t1, 1.0};
      l2.normal = {-t2, 1.0};
      lead = C;
    }
    l1.offset = dot(l1.normal, centre);
    l2.offset = dot(l2.normal, centre);
    return make_pair(IsoclineTag::TwoIntersectingLines, l1, l2, lead * m);
  }
  if (disc < -kDegenerateTol) {
    // A single real point: a complex-conjugate line pair.
    return {IsoclineTag::IrreducibleConic, {}, 0.0};
  }

  // Rank-one quadratic part: mu (n . p)^2 with unit n.
  const double mu = A + C;
  Vec2 row = std::abs(A) >= std::abs(C) ? Vec2{A, B} : Vec2{B, C};
  const Vec2 n = (1.0 / norm(row)) * row;
  const double lin = k[kX] * n.x + k[kY] * n.y;
  // mu u^2 + lin u + F = 0
  const double d2 = lin * lin - 4.0 * mu * F;
  if (d2 > kDegenerateTol) {
    const double sq = std::sqrt(d2);
    const double q = -0.5 * (lin + std::copysign(sq, lin));
    const double u1 = q / mu;
    const double u2 = F / q;
    return make_pair(IsoclineTag::TwoParallelLines, {n, u1}, {n, u2}, mu * m);
  }
  if (d2 >= -kDegenerateTol) {
    IsoclineClass out;
    out.tag = IsoclineTag::DoubleLine;
    out.lines.resize(1);
    const double len = normalise({n, -lin / (2.0 * mu)}, out.lines[0]);
    out.scale = mu * m * len * len;
    return out;
  }
  return {IsoclineTag::IrreducibleConic, {}, 0.0};
}

ConicCurve expand(const IsoclineClass& cls) {
  ConicCurve out;
  auto& k = out.coeffs;
  if (cls.lines.empty()) return out;
  auto linear = [](const Line& l) {
    return std::array<double, 3>{-l.offset, l.normal.x, l.normal.y};  // 1, x, y
  };
  if (cls.tag == IsoclineTag::SingleLine) {
    const auto f = linear(cls.lines[0]);
    k[k1] = cls.scale * f[0];
    k[kX] = cls.scale * f[1];
    k[kY] = cls.scale * f[2];
    return out;
  }
  const auto f = linear(cls.lines[0]);
  const auto g = linear(cls.lines.size() > 1 ? cls.lines[1] : cls.lines[0]);
  const double s = cls.scale;
  k[k1] = s * f[0] * g[0];
  k[kX] = s * (f[0] * g[1] + f[1] * g[0]);
  k[kY] = s * (f[0] * g[2] + f[2] * g[0]);
  k[kXX] = s * f[1] * g[1];
  k[kXY] = s * (f[1] * g[2] + f[2] * g[1]);
  k[kYY] = s * f[2] * g[2];
  return out;
}

}  // namespace qlc
