#include "qlc/separatrix.hpp"

#include <cmath>
#include <limits>

#include "qlc/singular.hpp"
#include "stepper.hpp"

namespace qlc {

namespace {
constexpr double kSaddleBall = 1e-3;
constexpr double kFocusBall = 1e-3;
constexpr int kDecreasingReturns = 3;
}  // namespace

std::string_view to_string(SeparatrixTag tag) {
  switch (tag) {
    case SeparatrixTag::SpiralsToFocusRegion: return "SpiralsToFocusRegion";
    case SeparatrixTag::EscapesDomain: return "EscapesDomain";
    case SeparatrixTag::ReturnsNearSaddle: return "ReturnsNearSaddle";
  }
  return "?";
}

std::string_view to_string(Branch branch) {
  return branch == Branch::TowardFocus ? "toward_focus" : "away_from_focus";
}

SaddleFrame saddle_frame(const QuadraticCoefficients& system, Vec2 saddle, Vec2 focus, double epsilon) {
  const Mat2 j = jacobian(system, saddle);
  if (!(j.det() < 0.0)) throw DomainError("not a saddle");
  const double tr = j.trace();
  const double sq = std::sqrt(tr * tr - 4.0 * j.det());
  SaddleFrame f;
  f.location = saddle;
  f.epsilon = epsilon;
  f.unstable_eigenvalue = 0.5 * (tr + sq);
  f.stable_eigenvalue = 0.5 * (tr - sq);

  auto eigenvector = [&](double sigma) {
    // Rows of J - sigma I are orthogonal to v; use the better-conditioned row.
    const Vec2 r1{j.xx - sigma, j.xy};
    const Vec2 r2{j.yx, j.yy - sigma};
    const Vec2 r = norm(r1) >= norm(r2) ? r1 : r2;
    Vec2 v{-r.y, r.x};
    v = (1.0 / norm(v)) * v;
    if (dot(v, focus - saddle) < 0.0) v = -1.0 * v;
    const Vec2 res = j * v - sigma * v;
    f.residual = std::max(f.residual, norm(res));
    return v;
  };
  f.unstable = eigenvector(f.unstable_eigenvalue);
  f.stable = eigenvector(f.stable_eigenvalue);
  return f;
}

Vec2 principal_saddle(const CanonicalParamsII& p) {
  const auto pts = finite_singular_points(p);
  const SingularPoint* best = nullptr;
  for (const auto& sp : pts) {
    if (sp.kind != SingularKind::Saddle) continue;
    if (!best || norm(sp.location) < norm(best->location)) best = &sp;
  }
  if (!best) throw DomainError("no saddle");
  return best->location;
}

SeparatrixOutcome classify_unstable_separatrix(const CanonicalParamsII& p, const SaddleFrame& frame, Branch branch,
                                               const IntegratorConfig& config) {
  const auto sys = canonical_to_general(p);
  const double sign = branch == Branch::TowardFocus ? 1.0 : -1.0;
  const Vec2 start = frame.location + (sign * frame.epsilon) * frame.unstable;

  SeparatrixOutcome out;
  out.witness.times.push_back(0.0);
  out.witness.points.push_back(start);
  detail::FlowStepper stepper(sys, start, 1, config);
  detail::SectionWatch watch(Section{}, +1, start);
  bool left_ball = false;

  auto finish = [&](SeparatrixTag tag, TerminalStatus status) {
    out.tag = tag;
    out.witness.status = status;
    return out;
  };
  auto near_saddle = [&](Vec2 z) { return left_ball && norm(z - frame.location) < kSaddleBall; };

  while (auto step = stepper.advance()) {
    out.witness.times.push_back(step->t1);
    out.witness.points.push_back(step->z1);
    if (norm(step->z1 - frame.location) >= kSaddleBall) left_ball = true;

    if (auto hit = watch.check(stepper, *step)) {
      out.returns.push_back(hit->point.x);
      const std::size_t n = out.returns.size();
      if (n >= kDecreasingReturns) {
        bool decreasing = true;
        for (std::size_t k = n - kDecreasingReturns + 1; k < n; ++k) {
          decreasing = decreasing && out.returns[k] < out.returns[k - 1];
        }
        if (decreasing) return finish(SeparatrixTag::SpiralsToFocusRegion, TerminalStatus::EventLimitReached);
      }
    }
    if (auto term = detail::terminal_state(stepper, step->z1)) {
      if (*term == TerminalStatus::LeftDomain) return finish(SeparatrixTag::EscapesDomain, *term);
      if (norm(step->z1) < kFocusBall) return finish(SeparatrixTag::SpiralsToFocusRegion, *term);
      if (near_saddle(step->z1)) return finish(SeparatrixTag::ReturnsNearSaddle, *term);
      throw DomainError("undecided");
    }
  }
  if (near_saddle(out.witness.back())) return finish(SeparatrixTag::ReturnsNearSaddle, TerminalStatus::TimeExhausted);
  throw DomainError("undecided");
}

LoopValue find_loop_parameter(const CanonicalParamsII& p, RotationParam param, double lo, double hi, double tol,
                              const IntegratorConfig& config, double epsilon) {
  if (!(lo < hi)) throw DomainError("no bracket");
  LoopValue out;
  out.param = param;

  auto outcome = [&](double mu, Branch branch) {
    ++out.evaluations;
    const CanonicalParamsII q = with(p, param, mu);
    const auto sys = canonical_to_general(q);
    const SaddleFrame frame = saddle_frame(sys, principal_saddle(q), {0.0, 0.0}, epsilon);
    return classify_unstable_separatrix(q, frame, branch, config).tag;
  };

  Branch branch = Branch::TowardFocus;
  SeparatrixTag o_lo = outcome(lo, branch);
  SeparatrixTag o_hi = outcome(hi, branch);
  if (o_lo == o_hi) {
    branch = Branch::AwayFromFocus;
    o_lo = outcome(lo, branch);
    o_hi = outcome(hi, branch);
    if (o_lo == o_hi) throw DomainError("no bracket");
  }
  out.branch = branch;
  out.lo_outcome = o_lo;
  out.hi_outcome = o_hi;

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const SeparatrixTag o = outcome(mid, branch);
    if (o == SeparatrixTag::ReturnsNearSaddle) {
      out.lo = lo;
      out.hi = hi;
      out.value = mid;
      return out;
    }
    (o == o_lo ? lo : hi) = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.value = 0.5 * (lo + hi);
  return out;
}

}  // namespace qlc
