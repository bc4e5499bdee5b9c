#pragma once

#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "qlc/flow.hpp"
#include "qlc/vectorfield.hpp"

namespace qlc {

enum class SingularKind {
  Saddle,
  StableFocus,
  UnstableFocus,
  StableNode,
  UnstableNode,
  LinearCenter,
  Degenerate,
};

std::string_view to_string(SingularKind kind);

/// Positive Jacobian determinant: focus, centre or node.
bool is_anti_saddle(SingularKind kind);

struct SingularPoint {
  Vec2 location;
  Mat2 jacobian;
  std::pair<std::complex<double>, std::complex<double>> eigenvalues;
  SingularKind kind = SingularKind::Degenerate;
  double divergence = 0.0;

  /// A LinearCenter is only a linear statement; the nonlinear character
  /// (centre or weak focus) is not decided by the Jacobian.
  bool nonlinear_character_undetermined() const { return kind == SingularKind::LinearCenter; }
};

std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Mat2& m);

/// Eigenvalue classification of a singular point. Throws DomainError when
/// |field(location)| exceeds 1e-10.
SingularKind classify(const QuadraticCoefficients& system, Vec2 location);

/// All real finite singular points, sorted by (x, y). They lie on the vertical
/// isocline lines y = 0 and, for nu = 1, y = -1, where ydot reduces to a
/// quadratic in x that is solved in closed form.
/// Throws DomainError("continuum of singular points") when ydot vanishes
/// identically on one of those lines.
std::vector<SingularPoint> finite_singular_points(const CanonicalParamsII& p);

/// Open gamma interval in which the gamma-only system keeps exactly two
/// finite singular points: -1 + 2(c -+ sqrt(c(c-1))).
/// Throws DomainError("condition undefined") for c(c-1) < 0.
std::pair<double, double> gamma_window(double c);

/// gamma lies strictly inside gamma_window(c).
bool gamma_window_condition(double c, double gamma);

/// -1 - sqrt(4 c gamma - 1) < beta + gamma + lambda < -1 + sqrt(4 c gamma - 1).
/// Throws DomainError("condition undefined") when 4 c gamma - 1 < 0.
/// With s = beta + gamma + lambda and b = beta + gamma this excludes singular
/// points on y = -1 whenever (1 - b)^2 <= (1 - s)^2 + 1, e.g. for b in [0, 2].
bool trace_window_condition(double c, double gamma, double beta, double lambda);

/// Open interval of beta + gamma + lambda allowed by trace_window_condition.
std::pair<double, double> trace_window(double c, double gamma);

/// Sign of the leading cubic coefficient of the displacement near a weak
/// focus at the origin. The displacement d(r) is sampled on the positive
/// x-axis at radii {1e-2, 2e-2, 4e-2}, fitted by L r^3 + M r^4, and the sign of
/// L is accepted only if the fit on the halved radii agrees. Returns 0 when
/// |L| is below the estimator noise (e.g. a true centre).
/// Throws DomainError("not a weak focus candidate") unless the origin has zero
/// trace (within 1e-12) and positive determinant.
int first_lyapunov_sign(const CanonicalParamsII& p, const IntegratorConfig& config = {});

}  // namespace qlc
