#include "qlc/rotation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlc {

std::string_view to_string(RotationParam param) {
  switch (param) {
    case RotationParam::Lambda: return "lambda";
    case RotationParam::Beta: return "beta";
    case RotationParam::Gamma: return "gamma";
  }
  return "?";
}

RotationParam rotation_param_from_string(std::string_view name) {
  for (RotationParam p : kRotationParams) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown rotation parameter: " + std::string(name));
}

double get(const CanonicalParamsII& p, RotationParam param) {
  switch (param) {
    case RotationParam::Lambda: return p.lambda;
    case RotationParam::Beta: return p.beta;
    case RotationParam::Gamma: return p.gamma;
  }
  return 0.0;
}

CanonicalParamsII with(CanonicalParamsII p, RotationParam param, double value) {
  switch (param) {
    case RotationParam::Lambda: p.lambda = value; break;
    case RotationParam::Beta: p.beta = value; break;
    case RotationParam::Gamma: p.gamma = value; break;
  }
  return p;
}

double delta(RotationParam param, const CanonicalParamsII& p, Vec2 pt) {
  const double x = pt.x;
  const double y = pt.y;
  const double common = -y * y * (1.0 + p.nu * y);
  switch (param) {
    case RotationParam::Lambda: return common;
    case RotationParam::Beta: return common * (1.0 + x);
    case RotationParam::Gamma: return common * (1.0 + x + p.c * y);
  }
  return 0.0;
}

double delta_numeric(RotationParam param, const CanonicalParamsII& p, Vec2 pt, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("delta_numeric: h must be positive");
  const double mu = get(p, param);
  const Vec2 f = eval(canonical_to_general(p), pt);
  const Vec2 fp = eval(canonical_to_general(with(p, param, mu + h)), pt);
  const Vec2 fm = eval(canonical_to_general(with(p, param, mu - h)), pt);
  const double dP = (fp.x - fm.x) / (2.0 * h);
  const double dQ = (fp.y - fm.y) / (2.0 * h);
  return f.x * dQ - f.y * dP;
}

SignReport rotation_sign_on_orbit(RotationParam param, const CanonicalParamsII& p, const Trajectory& orbit) {
  SignReport r;
  r.signs.reserve(orbit.points.size());
  for (Vec2 pt : orbit.points) {
    const double d = delta(param, p, pt);
    const int s = std::abs(d) < 1e-12 ? 0 : (d > 0.0 ? 1 : -1);
    r.signs.push_back(s);
    r.negative += s < 0;
    r.positive += s > 0;
    r.zero += s == 0;
  }
  r.constant = r.negative == 0 || r.positive == 0;
  r.sign = !r.constant ? 0 : (r.negative > 0 ? -1 : (r.positive > 0 ? 1 : 0));
  return r;
}

}  // namespace qlc
