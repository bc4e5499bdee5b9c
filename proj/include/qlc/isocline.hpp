#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "qlc/vectorfield.hpp"

namespace qlc {

/// c00 + c10 x + c01 y + c20 x^2 + c11 xy + c02 y^2, same slot layout as
/// one component of QuadraticCoefficients.
struct ConicCurve {
  std::array<double, 6> coeffs{};

  double operator()(Vec2 p) const;
  bool is_zero() const;
};

/// The line {p : normal . p = offset}. The normal has unit length and its
/// first nonzero component is positive.
struct Line {
  Vec2 normal;
  double offset = 0.0;
};

enum class IsoclineTag {
  TwoParallelLines,
  TwoIntersectingLines,
  DoubleLine,
  SingleLine,
  IrreducibleConic,
  EmptyOrWholePlane,
};

std::string_view to_string(IsoclineTag tag);

struct IsoclineClass {
  IsoclineTag tag = IsoclineTag::IrreducibleConic;
  /// Extracted real lines; sorted by (normal, offset). A DoubleLine carries one.
  std::vector<Line> lines;
  /// conic == scale * prod_i (normal_i . p - offset_i). For a DoubleLine the
  /// single line enters squared.
  double scale = 0.0;
};

/// Multiplies the factors of a classification back into conic coefficients.
ConicCurve expand(const IsoclineClass& cls);

struct NullclinePair {
  ConicCurve vertical;    // xdot = 0
  ConicCurve horizontal;  // ydot = 0
};

NullclinePair nullcline_conics(const QuadraticCoefficients& system);

/// Degenerate-conic factorisation. A conic is treated as degenerate when the
/// extended 3x3 determinant is below 1e-10 relative to the largest coefficient.
IsoclineClass classify_conic(const ConicCurve& conic);

}  // namespace qlc
