#include "qlc/vectorfield.hpp"

#include <algorithm>
#include <cmath>

namespace qlc {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

namespace {

double eval_component(const std::array<double, 6>& k, Vec2 p) {
  return k[k1] + k[kX] * p.x + k[kY] * p.y + k[kXX] * p.x * p.x + k[kXY] * p.x * p.y +
         k[kYY] * p.y * p.y;
}

bool all_finite(const std::array<double, 6>& k) {
  return std::all_of(k.begin(), k.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

bool QuadraticCoefficients::is_quadratic() const {
  for (std::size_t i : {kXX, kXY, kYY}) {
    if (a[i] != 0.0 || b[i] != 0.0) return true;
  }
  return false;
}

void QuadraticCoefficients::validate() const {
  if (!all_finite(a) || !all_finite(b)) {
    throw std::invalid_argument("quadratic coefficients must be finite");
  }
  if (!is_quadratic()) {
    throw std::invalid_argument("system has no quadratic term");
  }
}

void CanonicalParamsII::validate() const {
  if (nu != 0 && nu != 1) throw std::invalid_argument("nu must be 0 or 1");
  for (double v : {lambda, beta, gamma, a, c}) {
    if (!std::isfinite(v)) throw std::invalid_argument("canonical parameters must be finite");
  }
}

void CanonicalParamsI::validate() const {
  for (double v : {lambda, alpha, beta, gamma, a, c}) {
    if (!std::isfinite(v)) throw std::invalid_argument("canonical parameters must be finite");
  }
}

Vec2 eval(const QuadraticCoefficients& system, Vec2 point) {
  return {eval_component(system.a, point), eval_component(system.b, point)};
}

Mat2 jacobian(const QuadraticCoefficients& s, Vec2 p) {
  const auto& a = s.a;
  const auto& b = s.b;
  return {a[kX] + 2.0 * a[kXX] * p.x + a[kXY] * p.y, a[kY] + a[kXY] * p.x + 2.0 * a[kYY] * p.y,
          b[kX] + 2.0 * b[kXX] * p.x + b[kXY] * p.y, b[kY] + b[kXY] * p.x + 2.0 * b[kYY] * p.y};
}

double divergence(const QuadraticCoefficients& system, Vec2 point) {
  return jacobian(system, point).trace();
}

QuadraticCoefficients canonical_to_general(const CanonicalParamsII& p) {
  p.validate();
  QuadraticCoefficients q;
  q.a[kY] = -1.0;
  q.a[kYY] = -static_cast<double>(p.nu);
  q.b[kX] = 1.0;
  q.b[kY] = p.lambda + p.beta + p.gamma;
  q.b[kXX] = p.a;
  q.b[kXY] = p.beta + p.gamma;
  q.b[kYY] = p.c * p.gamma;
  return q;
}

QuadraticCoefficients canonical_to_general(const CanonicalParamsI& p) {
  p.validate();
  QuadraticCoefficients q;
  q.a[kY] = -1.0;
  q.a[kXY] = -1.0;
  q.a[kYY] = -p.alpha;
  q.b[kX] = 1.0;
  q.b[kY] = p.lambda + p.beta + p.gamma;
  q.b[kXX] = p.a;
  q.b[kXY] = p.alpha + p.beta + p.gamma;
  q.b[kYY] = p.c * p.gamma;
  return q;
}

Vec2 eval_canonical(const CanonicalParamsII& p, Vec2 pt) {
  const double x = pt.x;
  const double y = pt.y;
  const double xdot = -y * (1.0 + p.nu * y);
  const double ydot = x + (p.lambda + p.beta + p.gamma) * y + p.a * x * x +
                      (p.beta + p.gamma) * x * y + p.c * p.gamma * y * y;
  return {xdot, ydot};
}

CanonicalParamsII hamiltonian_params(double c) {
  return CanonicalParamsII{.nu = 1, .lambda = 0.0, .beta = 0.0, .gamma = 0.0, .a = 1.0, .c = c};
}

double hamiltonian_energy(Vec2 p) {
  const double x = p.x;
  const double y = p.y;
  return x * x / 2.0 + x * x * x / 3.0 + y * y / 2.0 + y * y * y / 3.0;
}

}  // namespace qlc
