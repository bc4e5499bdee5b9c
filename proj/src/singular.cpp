#include "qlc/singular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qlc {

namespace {
constexpr double kSingularResidual = 1e-10;
constexpr double kLinearTol = 1e-12;
}  // namespace

std::string_view to_string(SingularKind kind) {
  switch (kind) {
    case SingularKind::Saddle: return "Saddle";
    case SingularKind::StableFocus: return "StableFocus";
    case SingularKind::UnstableFocus: return "UnstableFocus";
    case SingularKind::StableNode: return "StableNode";
    case SingularKind::UnstableNode: return "UnstableNode";
    case SingularKind::LinearCenter: return "LinearCenter";
    case SingularKind::Degenerate: return "Degenerate";
  }
  return "?";
}

bool is_anti_saddle(SingularKind kind) {
  return kind != SingularKind::Saddle && kind != SingularKind::Degenerate;
}

std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double disc = tr * tr - 4.0 * m.det();
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    // Larger-magnitude root first, the other from the product to avoid cancellation.
    const double r1 = 0.5 * (tr + std::copysign(sq, tr));
    const double r2 = r1 != 0.0 ? m.det() / r1 : 0.0;
    return {std::max(r1, r2), std::min(r1, r2)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {{0.5 * tr, im}, {0.5 * tr, -im}};
}

namespace {

SingularKind classify_matrix(const Mat2& j) {
  const double det = j.det();
  const double tr = j.trace();
  if (std::abs(det) <= kLinearTol) return SingularKind::Degenerate;
  if (det < 0.0) return SingularKind::Saddle;
  if (std::abs(tr) <= kLinearTol) return SingularKind::LinearCenter;
  if (tr * tr - 4.0 * det < 0.0) return tr < 0.0 ? SingularKind::StableFocus : SingularKind::UnstableFocus;
  return tr < 0.0 ? SingularKind::StableNode : SingularKind::UnstableNode;
}

SingularPoint make_point(const QuadraticCoefficients& system, Vec2 loc) {
  SingularPoint sp;
  sp.location = loc;
  sp.jacobian = jacobian(system, loc);
  sp.eigenvalues = eigenvalues(sp.jacobian);
  sp.kind = classify(system, loc);
  sp.divergence = sp.jacobian.trace();
  return sp;
}

// Real roots of qa x^2 + qb x + qc = 0; throws on the zero polynomial.
std::vector<double> real_roots(double qa, double qb, double qc) {
  if (qa == 0.0) {
    if (qb == 0.0) {
      if (qc == 0.0) throw DomainError("continuum of singular points");
      return {};
    }
    return {-qc / qb};
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-qb / (2.0 * qa)};
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  std::vector<double> roots{q / qa};
  roots.push_back(q != 0.0 ? qc / q : -roots.front());
  return roots;
}

}  // namespace

SingularKind classify(const QuadraticCoefficients& system, Vec2 location) {
  const Vec2 f = eval(system, location);
  if (norm(f) > kSingularResidual) {
    std::ostringstream msg;
    msg << "not a singular point: |f| = " << norm(f);
    throw DomainError(msg.str());
  }
  return classify_matrix(jacobian(system, location));
}

std::vector<SingularPoint> finite_singular_points(const CanonicalParamsII& p) {
  p.validate();
  const QuadraticCoefficients sys = canonical_to_general(p);
  const double s = p.lambda + p.beta + p.gamma;
  const double b = p.beta + p.gamma;

  std::vector<Vec2> locs;
  // y = 0: x + a x^2.
  for (double x : real_roots(p.a, 1.0, 0.0)) locs.push_back({x, 0.0});
  if (p.nu == 1) {
    // y = -1: a x^2 + (1 - b) x + (c gamma - s).
    for (double x : real_roots(p.a, 1.0 - b, p.c * p.gamma - s)) locs.push_back({x, -1.0});
  }
  std::sort(locs.begin(), locs.end(), [](Vec2 l, Vec2 r) { return l.x < r.x || (l.x == r.x && l.y < r.y); });

  std::vector<SingularPoint> out;
  out.reserve(locs.size());
  for (Vec2 loc : locs) out.push_back(make_point(sys, loc));
  return out;
}

std::pair<double, double> gamma_window(double c) {
  const double r = c * (c - 1.0);
  if (!(r >= 0.0)) throw DomainError("condition undefined");
  const double sq = std::sqrt(r);
  return {-1.0 + 2.0 * (c - sq), -1.0 + 2.0 * (c + sq)};
}

bool gamma_window_condition(double c, double gamma) {
  const auto [lo, hi] = gamma_window(c);
  return lo < gamma && gamma < hi;
}

std::pair<double, double> trace_window(double c, double gamma) {
  const double r = 4.0 * c * gamma - 1.0;
  if (!(r >= 0.0)) throw DomainError("condition undefined");
  const double sq = std::sqrt(r);
  return {-1.0 - sq, -1.0 + sq};
}

bool trace_window_condition(double c, double gamma, double beta, double lambda) {
  const auto [lo, hi] = trace_window(c, gamma);
  const double s = beta + gamma + lambda;
  return lo < s && s < hi;
}

int first_lyapunov_sign(const CanonicalParamsII& p, const IntegratorConfig& config) {
  p.validate();
  const QuadraticCoefficients sys = canonical_to_general(p);
  const Mat2 j = jacobian(sys, {0.0, 0.0});
  if (std::abs(j.trace()) > kLinearTol || !(j.det() > 0.0)) {
    throw DomainError("not a weak focus candidate");
  }

  const Section section;
  auto displacement = [&](double r) {
    const Crossing hit = next_section_crossing(sys, {r, 0.0}, section, +1, config);
    return section.coordinate(hit.point) - r;
  };

  // Least-squares fit of d(r) = L r^3 + M r^4.
  auto fit = [&](const std::array<double, 3>& radii) {
    double s66 = 0, s67 = 0, s77 = 0, s3d = 0, s4d = 0;
    for (double r : radii) {
      const double d = displacement(r);
      const double r3 = r * r * r, r4 = r3 * r;
      s66 += r3 * r3;
      s67 += r3 * r4;
      s77 += r4 * r4;
      s3d += r3 * d;
      s4d += r4 * d;
    }
    return (s3d * s77 - s4d * s67) / (s66 * s77 - s67 * s67);
  };

  const double coarse = fit({1e-2, 2e-2, 4e-2});
  const double fine = fit({5e-3, 1e-2, 2e-2});
  // Noise in d is ~1e-12 at the default tolerances, i.e. ~1e-5 in L at the
  // smallest radius; genuine weak foci of the family have |L| = O(1).
  constexpr double kNoise = 1e-3;
  if (std::abs(coarse) < kNoise || std::abs(fine) < kNoise) return 0;
  if ((coarse > 0.0) != (fine > 0.0)) return 0;
  return coarse > 0.0 ? 1 : -1;
}

}  // namespace qlc
