#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlc {

/// Raised for numerical-domain failures (no return, undecided separatrix, ...).
/// The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);

/// Row-major 2x2 matrix.
struct Mat2 {
  double xx = 0.0, xy = 0.0;
  double yx = 0.0, yy = 0.0;

  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * yx; }
  Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
};

/// Slot order shared by both components of a quadratic system.
enum Monomial : std::size_t { k1 = 0, kX = 1, kY = 2, kXX = 3, kXY = 4, kYY = 5 };

/// xdot = a00 + a10 x + a01 y + a20 x^2 + a11 xy + a02 y^2, likewise ydot with b.
/// Each component is stored in the fixed monomial layout of `Monomial`.
struct QuadraticCoefficients {
  std::array<double, 6> a{};
  std::array<double, 6> b{};

  /// True when at least one second-degree coefficient is nonzero.
  bool is_quadratic() const;
  /// Throws std::invalid_argument if not quadratic or not finite.
  void validate() const;

  friend bool operator==(const QuadraticCoefficients&, const QuadraticCoefficients&) = default;
};

/// Canonical form with two parallel line-isoclines:
///   xdot = -y (1 + nu y)
///   ydot = x + (lambda + beta + gamma) y + a x^2 + (beta + gamma) x y + c gamma y^2
struct CanonicalParamsII {
  int nu = 1;
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double a = 1.0;
  double c = 0.0;

  /// Trace of the linearisation at the origin.
  double origin_trace() const { return lambda + beta + gamma; }
  void validate() const;

  friend bool operator==(const CanonicalParamsII&, const CanonicalParamsII&) = default;
};

/// Companion canonical form (intersecting isoclines):
///   xdot = -y (1 + x + alpha y)
///   ydot = x + (lambda + beta + gamma) y + a x^2 + (alpha + beta + gamma) x y + c gamma y^2
struct CanonicalParamsI {
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double a = 1.0;
  double c = 0.0;

  void validate() const;
};

Vec2 eval(const QuadraticCoefficients& system, Vec2 point);
Mat2 jacobian(const QuadraticCoefficients& system, Vec2 point);
double divergence(const QuadraticCoefficients& system, Vec2 point);

QuadraticCoefficients canonical_to_general(const CanonicalParamsII& p);
QuadraticCoefficients canonical_to_general(const CanonicalParamsI& p);

/// Direct evaluation of the canonical II right-hand side (independent of the
/// coefficient embedding).
Vec2 eval_canonical(const CanonicalParamsII& p, Vec2 point);

/// The Hamiltonian member of the family: nu = 1, a = 1, all rotation
/// parameters zero. `c` does not enter the field once gamma = 0.
CanonicalParamsII hamiltonian_params(double c = 2.0);

/// Energy of the Hamiltonian member, H = x^2/2 + x^3/3 + y^2/2 + y^3/3,
/// with xdot = -dH/dy and ydot = dH/dx.
double hamiltonian_energy(Vec2 point);

}  // namespace qlc
