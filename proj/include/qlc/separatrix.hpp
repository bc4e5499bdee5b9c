#pragma once

#include <string_view>
#include <vector>

#include "qlc/flow.hpp"
#include "qlc/rotation.hpp"
#include "qlc/vectorfield.hpp"

namespace qlc {

struct SaddleFrame {
  Vec2 location;
  double unstable_eigenvalue = 0.0;
  Vec2 unstable;  // unit, pointing into the half-plane of the focus
  double stable_eigenvalue = 0.0;
  Vec2 stable;    // unit, pointing into the half-plane of the focus
  double epsilon = 1e-6;
  double residual = 0.0;  // max |J v - sigma v| over both eigenpairs

  double divergence() const { return unstable_eigenvalue + stable_eigenvalue; }
};

/// Eigen-decomposition of the Jacobian at a saddle, eigenvectors oriented
/// towards `focus`. Throws DomainError("not a saddle") unless det J < 0.
SaddleFrame saddle_frame(const QuadraticCoefficients& system, Vec2 saddle, Vec2 focus = {0.0, 0.0},
                         double epsilon = 1e-6);

/// The saddle of the canonical system closest to the origin.
/// Throws DomainError("no saddle") when there is none.
Vec2 principal_saddle(const CanonicalParamsII& p);

enum class SeparatrixTag { SpiralsToFocusRegion, EscapesDomain, ReturnsNearSaddle };

std::string_view to_string(SeparatrixTag tag);

/// Which half of the unstable manifold is followed.
enum class Branch { TowardFocus, AwayFromFocus };

std::string_view to_string(Branch branch);

struct SeparatrixOutcome {
  SeparatrixTag tag = SeparatrixTag::EscapesDomain;
  Trajectory witness;
  std::vector<double> returns;  // successive crossings of the positive x-axis
};

/// Follows the unstable separatrix from saddle + eps * v_u (the sign of eps
/// chosen by `branch`) and classifies it:
///   - leaves the domain box: EscapesDomain;
///   - three strictly decreasing returns to the positive x-axis, or convergence
///     to the origin: SpiralsToFocusRegion;
///   - the orbit ends (time or convergence) inside the 1e-3 ball around the
///     saddle it left: ReturnsNearSaddle.
/// Throws DomainError("undecided") otherwise.
SeparatrixOutcome classify_unstable_separatrix(const CanonicalParamsII& p, const SaddleFrame& frame,
                                               Branch branch = Branch::TowardFocus,
                                               const IntegratorConfig& config = {});

struct LoopValue {
  RotationParam param = RotationParam::Beta;
  double value = 0.0;
  double lo = 0.0, hi = 0.0;  // final bracket
  SeparatrixTag lo_outcome = SeparatrixTag::SpiralsToFocusRegion;
  SeparatrixTag hi_outcome = SeparatrixTag::EscapesDomain;
  Branch branch = Branch::TowardFocus;
  int evaluations = 0;
};

/// Bisects the parameter on the separatrix outcome to |hi - lo| <= tol. The
/// branch towards the focus is tried first; the other unstable branch is used
/// if only it changes outcome across the bracket. A midpoint classified
/// ReturnsNearSaddle ends the search there.
/// Throws DomainError("no bracket") when neither branch changes outcome.
LoopValue find_loop_parameter(const CanonicalParamsII& p, RotationParam param, double lo, double hi,
                              double tol = 1e-8, const IntegratorConfig& config = {}, double epsilon = 1e-6);

}  // namespace qlc
