#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "qlc/flow.hpp"
#include "qlc/vectorfield.hpp"

namespace qlc {

/// Parameters that rotate the field of the canonical family.
enum class RotationParam { Lambda, Beta, Gamma };

inline constexpr std::array<RotationParam, 3> kRotationParams{RotationParam::Lambda, RotationParam::Beta,
                                                              RotationParam::Gamma};

std::string_view to_string(RotationParam param);
/// Accepts "lambda", "beta", "gamma" (case-sensitive). Throws std::invalid_argument.
RotationParam rotation_param_from_string(std::string_view name);

double get(const CanonicalParamsII& p, RotationParam param);
CanonicalParamsII with(CanonicalParamsII p, RotationParam param, double value);

/// Closed-form rotation determinant P dQ/dmu - Q dP/dmu:
///   Lambda: -y^2 (1 + nu y)
///   Beta:   -y^2 (1 + x) (1 + nu y)
///   Gamma:  -y^2 (1 + x + c y) (1 + nu y)
double delta(RotationParam param, const CanonicalParamsII& p, Vec2 point);

/// The same determinant with dQ/dmu and dP/dmu replaced by central differences
/// of step h in the parameter.
double delta_numeric(RotationParam param, const CanonicalParamsII& p, Vec2 point, double h);

struct SignReport {
  std::vector<int> signs;  // per orbit point: -1, 0 (|delta| < 1e-12) or +1
  int negative = 0;
  int positive = 0;
  int zero = 0;
  /// True when all nonzero signs agree.
  bool constant = true;
  /// The common sign when constant (0 if every point was excluded).
  int sign = 0;
};

SignReport rotation_sign_on_orbit(RotationParam param, const CanonicalParamsII& p, const Trajectory& orbit);

}  // namespace qlc
