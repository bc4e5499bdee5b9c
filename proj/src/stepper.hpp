#pragma once

// Internal integration engine shared by flow, cycles and separatrix.

#include <array>
#include <optional>

#include <boost/numeric/odeint.hpp>

#include "qlc/flow.hpp"

namespace qlc::detail {

using State = std::array<double, 2>;

struct Rhs {
  const QuadraticCoefficients* system;
  double sign;

  void operator()(const State& z, State& dz, double /*t*/) const {
    const Vec2 v = eval(*system, {z[0], z[1]});
    dz[0] = sign * v.x;
    dz[1] = sign * v.y;
  }
};

/// One accepted step [t0, t1] in elapsed time.
struct Step {
  double t0 = 0.0, t1 = 0.0;
  Vec2 z0, z1;
};

class FlowStepper {
 public:
  FlowStepper(const QuadraticCoefficients& system, Vec2 start, int direction,
              const IntegratorConfig& config);

  /// Advances one accepted step, clamped at config.max_time. Returns nullopt
  /// once max_time has been reached.
  std::optional<Step> advance();

  /// State at elapsed time t inside the last step, from a fresh DP5 step of
  /// length t - t0 started at the step's initial state.
  Vec2 exact(double t) const;

  /// Field in the integration direction.
  Vec2 field(Vec2 p) const;
  double speed(Vec2 p) const { return norm(eval(*system_, p)); }

  const IntegratorConfig& config() const { return config_; }

 private:
  using Dopri = boost::numeric::odeint::runge_kutta_dopri5<State>;
  using Dense = boost::numeric::odeint::result_of::make_dense_output<Dopri>::type;

  const QuadraticCoefficients* system_;
  Rhs rhs_;
  IntegratorConfig config_;
  Dense dense_;
  mutable Dopri single_;
  Step last_;
  bool done_ = false;
};

/// Detects oriented crossings of a section ray step by step.
class SectionWatch {
 public:
  SectionWatch(const Section& section, int orientation, Vec2 start);

  /// Checks the step for a crossing and refines it to |offset| <= 1e-11 with
  /// exact sub-steps. Updates the collar state.
  std::optional<Crossing> check(const FlowStepper& stepper, const Step& step);

 private:
  Section section_;
  int orientation_;
  bool armed_;
};

/// True when the orbit should stop at `p` for reasons other than time.
std::optional<TerminalStatus> terminal_state(const FlowStepper& stepper, Vec2 p);

}  // namespace qlc::detail
