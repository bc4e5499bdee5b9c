#include "qlc/flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "stepper.hpp"

namespace qlc {

namespace odeint = boost::numeric::odeint;

std::string_view to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::TimeExhausted: return "TimeExhausted";
    case TerminalStatus::LeftDomain: return "LeftDomain";
    case TerminalStatus::ConvergedToPoint: return "ConvergedToPoint";
    case TerminalStatus::EventLimitReached: return "EventLimitReached";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(max_time > 0.0)) throw std::invalid_argument("max time must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("max step must be positive");
}

IntegratorConfig IntegratorConfig::tightened(double factor) const {
  IntegratorConfig out = *this;
  out.rtol /= factor;
  out.atol /= factor;
  return out;
}

void Section::validate() const {
  if (!(x_min > 0.0) || !(x_max > x_min)) throw std::invalid_argument("section range must satisfy 0 < x_min < x_max");
  if (std::abs(norm(direction) - 1.0) > 1e-12) throw std::invalid_argument("section direction must be a unit vector");
}

namespace detail {

namespace {
constexpr double kConvergedSpeed = 1e-12;
constexpr double kCollar = 1e-8;
constexpr double kCrossingTol = 1e-11;
}  // namespace

FlowStepper::FlowStepper(const QuadraticCoefficients& system, Vec2 start, int direction,
                         const IntegratorConfig& config)
    : system_(&system),
      rhs_{&system, direction < 0 ? -1.0 : 1.0},
      config_(config),
      dense_(odeint::make_dense_output(config.atol, config.rtol, config.max_step, Dopri())) {
  config_.validate();
  dense_.initialize(State{start.x, start.y}, 0.0, std::min(1e-2, config_.max_step));
  last_.t1 = 0.0;
  last_.z1 = start;
}

std::optional<Step> FlowStepper::advance() {
  if (done_) return std::nullopt;
  Step step;
  step.t0 = last_.t1;
  step.z0 = last_.z1;
  try {
    dense_.do_step(rhs_);
  } catch (const odeint::step_adjustment_error&) {
    std::ostringstream msg;
    msg << "stiffness/underflow at t=" << step.t0;
    throw DomainError(msg.str());
  }
  const double dt = dense_.current_time() - dense_.previous_time();
  if (dt < 1e-14 * std::max(1.0, step.t0)) {
    std::ostringstream msg;
    msg << "stiffness/underflow at t=" << step.t0;
    throw DomainError(msg.str());
  }
  step.t1 = dense_.current_time();
  const State& z = dense_.current_state();
  step.z1 = {z[0], z[1]};
  if (step.t1 >= config_.max_time) {
    step.t1 = config_.max_time;
    step.z1 = exact(step.t1);
    done_ = true;
  }
  last_ = step;
  return step;
}

Vec2 FlowStepper::exact(double t) const {
  const State& z0 = dense_.previous_state();
  const double t0 = dense_.previous_time();
  if (t == t0) return {z0[0], z0[1]};
  // The explicit-derivative overload: the FSAL overload would reuse the
  // derivative cached by the previous call.
  State dz0, out, dz1;
  rhs_(z0, dz0, t0);
  single_.do_step(rhs_, z0, dz0, t0, out, dz1, t - t0);
  return {out[0], out[1]};
}

Vec2 FlowStepper::field(Vec2 p) const { return rhs_.sign * eval(*system_, p); }

SectionWatch::SectionWatch(const Section& section, int orientation, Vec2 start)
    : section_(section),
      orientation_(orientation < 0 ? -1 : 1),
      armed_(std::abs(section.offset(start)) > kCollar) {}

std::optional<Crossing> SectionWatch::check(const FlowStepper& stepper, const Step& step) {
  const double g0 = orientation_ * section_.offset(step.z0);
  const double g1 = orientation_ * section_.offset(step.z1);
  const bool was_armed = armed_;
  if (std::abs(g1) > kCollar) armed_ = true;
  if (!was_armed || !(g0 < 0.0 && g1 >= 0.0)) return std::nullopt;

  auto g = [&](double t) { return orientation_ * section_.offset(stepper.exact(t)); };
  double t_star = step.t1;
  if (g1 != 0.0) {
    std::uintmax_t iters = 100;
    auto tol = [](double a, double b) {
      return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
    };
    auto [lo, hi] = boost::math::tools::toms748_solve(g, step.t0, step.t1, g0, g1, tol, iters);
    const double glo = g(lo);
    const double ghi = g(hi);
    t_star = std::abs(glo) <= std::abs(ghi) ? lo : hi;
  }
  const Vec2 p = stepper.exact(t_star);
  // The bracket collapses to a few ulps in t, far below kCrossingTol in offset.
  if (std::abs(section_.offset(p)) > kCrossingTol) return std::nullopt;
  if (section_.coordinate(p) <= 0.0) return std::nullopt;
  return Crossing{p, t_star};
}

std::optional<TerminalStatus> terminal_state(const FlowStepper& stepper, Vec2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !stepper.config().domain.contains(p)) {
    return TerminalStatus::LeftDomain;
  }
  if (stepper.speed(p) < kConvergedSpeed) return TerminalStatus::ConvergedToPoint;
  return std::nullopt;
}

}  // namespace detail

Trajectory integrate(const QuadraticCoefficients& system, Vec2 start, double duration,
                     const IntegratorConfig& config) {
  if (!std::isfinite(start.x) || !std::isfinite(start.y) || !std::isfinite(duration)) {
    throw std::invalid_argument("integrate: non-finite input");
  }
  IntegratorConfig cfg = config;
  cfg.max_time = std::min(config.max_time, std::abs(duration));
  Trajectory traj;
  traj.direction = duration < 0.0 ? -1 : 1;
  traj.times.push_back(0.0);
  traj.points.push_back(start);
  if (cfg.max_time <= 0.0) {
    traj.status = TerminalStatus::TimeExhausted;
    return traj;
  }
  detail::FlowStepper stepper(system, start, traj.direction, cfg);
  if (auto term = detail::terminal_state(stepper, start)) {
    traj.status = *term;
    return traj;
  }
  while (auto step = stepper.advance()) {
    traj.times.push_back(step->t1);
    traj.points.push_back(step->z1);
    if (auto term = detail::terminal_state(stepper, step->z1)) {
      traj.status = *term;
      return traj;
    }
  }
  traj.status = TerminalStatus::TimeExhausted;
  return traj;
}

namespace {

template <bool Record>
std::optional<Trajectory> run_to_section(const QuadraticCoefficients& system, Vec2 start,
                                         const Section& section, int orientation,
                                         const IntegratorConfig& config) {
  detail::FlowStepper stepper(system, start, 1, config);
  detail::SectionWatch watch(section, orientation, start);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(start);
  if (detail::terminal_state(stepper, start)) return std::nullopt;
  while (auto step = stepper.advance()) {
    if (auto hit = watch.check(stepper, *step)) {
      if constexpr (Record) {
        traj.times.push_back(hit->time);
        traj.points.push_back(hit->point);
      } else {
        traj.times.back() = hit->time;
        traj.points.back() = hit->point;
      }
      traj.status = TerminalStatus::EventLimitReached;
      return traj;
    }
    if constexpr (Record) {
      traj.times.push_back(step->t1);
      traj.points.push_back(step->z1);
    }
    if (detail::terminal_state(stepper, step->z1)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Crossing> first_section_crossing(const QuadraticCoefficients& system, Vec2 start,
                                               const Section& section, int orientation,
                                               const IntegratorConfig& config) {
  auto traj = run_to_section<false>(system, start, section, orientation, config);
  if (!traj) return std::nullopt;
  return Crossing{traj->points.back(), traj->times.back()};
}

Crossing next_section_crossing(const QuadraticCoefficients& system, Vec2 start,
                               const Section& section, int orientation,
                               const IntegratorConfig& config) {
  auto hit = first_section_crossing(system, start, section, orientation, config);
  if (!hit) throw DomainError("no return");
  return *hit;
}

std::optional<Trajectory> orbit_to_section(const QuadraticCoefficients& system, Vec2 start,
                                           const Section& section, int orientation,
                                           const IntegratorConfig& config) {
  return run_to_section<true>(system, start, section, orientation, config);
}

}  // namespace qlc
