#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qlc/vectorfield.hpp"

namespace qlc {

struct Box {
  double x_min = -10.0, x_max = 10.0;
  double y_min = -10.0, y_max = 10.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.1;
  double max_time = 500.0;
  Box domain;

  void validate() const;
  /// Copy with both tolerances divided by `factor`.
  IntegratorConfig tightened(double factor) const;
};

enum class TerminalStatus { TimeExhausted, LeftDomain, ConvergedToPoint, EventLimitReached };

std::string_view to_string(TerminalStatus status);

/// Sampled orbit. `times` holds elapsed integration time (strictly increasing
/// from 0); the physical time of sample i is direction * times[i], with
/// direction = -1 for time-reversed integration.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> points;
  TerminalStatus status = TerminalStatus::TimeExhausted;
  int direction = 1;

  Vec2 back() const { return points.back(); }
  std::size_t size() const { return points.size(); }
};

/// A transversal ray: base + u * direction for u > 0. The range (x_min, x_max)
/// is the part of the ray used for displacement sampling.
struct Section {
  Vec2 base{0.0, 0.0};
  Vec2 direction{1.0, 0.0};
  double x_min = 1e-3;
  double x_max = 0.95;

  void validate() const;
  Vec2 point_at(double u) const { return base + u * direction; }
  /// Coordinate along the ray.
  double coordinate(Vec2 p) const { return dot(p - base, direction); }
  /// Signed distance to the supporting line, positive to the left of `direction`.
  double offset(Vec2 p) const { return cross(direction, p - base); }
};

struct Crossing {
  Vec2 point;
  double time = 0.0;  // elapsed
};

/// Adaptive Dormand-Prince 5(4) integration. A negative duration integrates the
/// time-reversed flow. Stops early when the orbit leaves config.domain or the
/// speed drops below 1e-12 (ConvergedToPoint). Throws DomainError on step-size
/// underflow.
Trajectory integrate(const QuadraticCoefficients& system, Vec2 start, double duration,
                     const IntegratorConfig& config = {});

/// First crossing of the section ray with the given orientation (+1: offset
/// goes from negative to positive). Crossings are ignored until the orbit has
/// left a 1e-8 collar around the supporting line. Returns nullopt when the
/// orbit leaves the domain, converges, or runs out of time first.
std::optional<Crossing> first_section_crossing(const QuadraticCoefficients& system, Vec2 start,
                                               const Section& section, int orientation,
                                               const IntegratorConfig& config = {});

/// As first_section_crossing, throwing DomainError("no return") on failure.
Crossing next_section_crossing(const QuadraticCoefficients& system, Vec2 start,
                               const Section& section, int orientation,
                               const IntegratorConfig& config = {});

/// Integrates from `start` up to and including the first crossing, recording
/// every accepted step. The last point is the refined crossing.
std::optional<Trajectory> orbit_to_section(const QuadraticCoefficients& system, Vec2 start,
                                           const Section& section, int orientation,
                                           const IntegratorConfig& config = {});

}  // namespace qlc
