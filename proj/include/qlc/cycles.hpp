#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qlc/flow.hpp"
#include "qlc/rotation.hpp"
#include "qlc/vectorfield.hpp"

namespace qlc {

enum class Stability { Stable, Unstable, SemiStable };

std::string_view to_string(Stability s);

/// One section sample. `present` is false when the orbit from x does not
/// return to the section (it escapes, converges, or runs out of time).
struct DisplacementSample {
  double x = 0.0;
  bool present = false;
  double px = 0.0;  // P(x), valid when present
  double dx = 0.0;  // P(x) - x, valid when present
};

struct DisplacementSamples {
  std::vector<DisplacementSample> samples;  // strictly increasing x
};

struct LimitCycleRecord {
  double x = 0.0;           // fixed point on the section
  double period = 0.0;
  double multiplier = 0.0;  // d'(x), central difference
  Stability stability = Stability::Stable;
  int multiplicity = 1;
  double residual = 0.0;    // d(x)
  int winding_origin = 0;   // winding number of the orbit around (0,0)
  bool encloses_only_origin = false;
  Trajectory orbit;         // one period, empty when not recorded
};

struct CycleSearchConfig {
  IntegratorConfig integrator;
  Section section;
  int samples = 64;
  double stability_tol = 1e-5;
  double zero_tol = 1e-9;
  double semistable_tol = 1e-8;
  double cluster_tol = 1e-6;
  double root_width = 1e-10;
  /// Points added below each escape boundary, geometric down to 1e-11.
  int boundary_samples = 16;
  bool record_orbits = true;
};

struct CycleSearch {
  std::vector<LimitCycleRecord> cycles;  // sorted by x
  /// The displacement vanishes on the whole scan (a centre): no isolated zeros.
  bool center_annulus = false;
  DisplacementSamples scan;
  /// Largest x below which orbits return; absent when every sample returns.
  std::optional<double> escape_boundary;
};

/// Poincare return map on the section ray, positive orientation (the flow of
/// the family turns counter-clockwise around the origin).
class ReturnMap {
 public:
  ReturnMap(const QuadraticCoefficients& system, const Section& section, const IntegratorConfig& config);

  std::optional<double> operator()(double x) const;
  std::optional<double> displacement(double x) const;

  const QuadraticCoefficients& system() const { return system_; }
  const Section& section() const { return section_; }
  const IntegratorConfig& config() const { return config_; }

 private:
  QuadraticCoefficients system_;
  Section section_;
  IntegratorConfig config_;
};

/// Winding number of the closed polygon around q (the last point is joined to
/// the first).
int winding_number(const std::vector<Vec2>& polygon, Vec2 q);

/// n geometrically spaced samples over [section.x_min, section.x_max].
/// Throws DomainError("no surrounding cycles possible") unless the origin is a
/// focus or linear centre; std::invalid_argument for n < 16.
DisplacementSamples displacement_scan(const CanonicalParamsII& p, const Section& section, int n,
                                      const IntegratorConfig& config = {});

/// Isolated zeros of the displacement on the section: sign changes refined to
/// config.root_width, plus tangential zeros (local minima of |d| below
/// semistable_tol). Throws DomainError("refine grid") when two zeros lie within
/// cluster_tol of each other.
CycleSearch find_cycles(const CanonicalParamsII& p, const CycleSearchConfig& config = {});

struct CycleCount {
  int count = 0;
  std::vector<LimitCycleRecord> cycles;
  int samples = 0;  // grid size of the accepted level
  /// The origin is a node. A periodic orbit of a quadratic system surrounds a
  /// single singular point, which is a focus, so the count is 0 without a scan.
  bool node_origin = false;
};

/// Counts isolated zeros with grids of 32, 64, ... samples until two successive
/// levels agree. A node at the origin gives 0 (see CycleCount).
/// Throws DomainError("inconclusive") after 4 refinements, and
/// DomainError when the system does not have exactly two finite singular points.
CycleCount count_cycles_around_origin(const CanonicalParamsII& p, const CycleSearchConfig& config = {});

enum class FamilyTermination { RangeEnd, FoldDetected, ShrankToFocus, SeparatrixLoop };

std::string_view to_string(FamilyTermination t);

struct FamilyPoint {
  double mu = 0.0;
  double x = 0.0;
  double multiplier = 0.0;
  Stability stability = Stability::Stable;
};

struct FamilyCurve {
  RotationParam param = RotationParam::Lambda;
  std::vector<FamilyPoint> points;
  FamilyTermination termination = FamilyTermination::RangeEnd;
  /// Euclidean length in (mu, x) of the last accepted continuation step.
  double last_step = 0.0;
};

struct StepPolicy {
  double initial_step = 1e-3;
  double max_step = 1e-2;
  double min_step = 1e-8;
  int max_points = 5000;
};

/// Thrown when continuation fails without a recognised termination; carries
/// the curve up to the last good point.
class ContinuationError : public DomainError {
 public:
  ContinuationError(const std::string& what, FamilyCurve curve)
      : DomainError(what), curve_(std::move(curve)) {}
  const FamilyCurve& curve() const { return curve_; }

 private:
  FamilyCurve curve_;
};

/// Continues the cycle through x_start at p as `param` moves towards mu_end.
/// Each step brackets the zero of d around a secant prediction (3 bracket
/// expansions), halving the parameter step on failure down to min_step.
FamilyCurve track_family(const CanonicalParamsII& p, RotationParam param, double x_start, double mu_end,
                         const StepPolicy& policy = {}, const CycleSearchConfig& config = {});

}  // namespace qlc
