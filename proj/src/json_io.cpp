#include "qlc/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qlc {

namespace {

constexpr const char* kSlotNames[6] = {"00", "10", "01", "20", "11", "02"};

// Rejects keys outside `allowed`.
void check_keys(const Json& j, const char* type, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(type) + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw std::invalid_argument(std::string(type) + ": unknown key '" + k + "'");
  }
}

template <class T>
void read_opt(const Json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->template get<T>();
}

double read_number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing key '") + key + "'");
  if (!it->is_number()) throw std::invalid_argument(std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

void write_value(std::string& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        write_value(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric rows (points, matrices) stay on one line.
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && pretty ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write_value(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
  }
}

Json points_json(const std::vector<Vec2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(Json::array({p.x, p.y}));
  return a;
}

std::string_view to_string(SweepMode m) { return m == SweepMode::GammaOnly ? "gamma_only" : "constrained"; }

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // no negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write_value(out, j, indent, 0);
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::invalid_argument("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void to_json(Json& j, const Vec2& v) { j = Json::array({v.x, v.y}); }

void from_json(const Json& j, Vec2& v) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point: expected [x, y]");
  v = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(Json& j, const Mat2& m) { j = Json::array({Json::array({m.xx, m.xy}), Json::array({m.yx, m.yy})}); }

void to_json(Json& j, const QuadraticCoefficients& q) {
  j = Json::object();
  for (int s = 0; s < 6; ++s) j[std::string("a") + kSlotNames[s]] = q.a[s];
  for (int s = 0; s < 6; ++s) j[std::string("b") + kSlotNames[s]] = q.b[s];
}

void from_json(const Json& j, QuadraticCoefficients& q) {
  check_keys(j, "QuadraticCoefficients",
             {"a00", "a10", "a01", "a20", "a11", "a02", "b00", "b10", "b01", "b20", "b11", "b02"});
  for (int s = 0; s < 6; ++s) {
    q.a[s] = read_number(j, (std::string("a") + kSlotNames[s]).c_str());
    q.b[s] = read_number(j, (std::string("b") + kSlotNames[s]).c_str());
  }
  q.validate();
}

void to_json(Json& j, const CanonicalParamsII& p) {
  j = Json{{"nu", p.nu}, {"lambda", p.lambda}, {"beta", p.beta}, {"gamma", p.gamma}, {"a", p.a}, {"c", p.c}};
}

void from_json(const Json& j, CanonicalParamsII& p) {
  check_keys(j, "CanonicalParamsII", {"nu", "lambda", "beta", "gamma", "a", "c"});
  const auto nu = j.find("nu");
  if (nu == j.end() || !nu->is_number_integer()) throw std::invalid_argument("nu must be the integer 0 or 1");
  p.nu = nu->get<int>();
  p.lambda = read_number(j, "lambda");
  p.beta = read_number(j, "beta");
  p.gamma = read_number(j, "gamma");
  p.a = read_number(j, "a");
  p.c = read_number(j, "c");
  p.validate();
}

void to_json(Json& j, const CanonicalParamsI& p) {
  j = Json{{"lambda", p.lambda}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"a", p.a}, {"c", p.c}};
}

void from_json(const Json& j, CanonicalParamsI& p) {
  check_keys(j, "CanonicalParamsI", {"lambda", "alpha", "beta", "gamma", "a", "c"});
  p.lambda = read_number(j, "lambda");
  p.alpha = read_number(j, "alpha");
  p.beta = read_number(j, "beta");
  p.gamma = read_number(j, "gamma");
  p.a = read_number(j, "a");
  p.c = read_number(j, "c");
}

void to_json(Json& j, const Box& b) {
  j = Json{{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min}, {"y_max", b.y_max}};
}

void from_json(const Json& j, Box& b) {
  check_keys(j, "Box", {"x_min", "x_max", "y_min", "y_max"});
  read_opt(j, "x_min", b.x_min);
  read_opt(j, "x_max", b.x_max);
  read_opt(j, "y_min", b.y_min);
  read_opt(j, "y_max", b.y_max);
}

void to_json(Json& j, const IntegratorConfig& c) {
  j = Json{{"rtol", c.rtol}, {"atol", c.atol}, {"max_step", c.max_step}, {"max_time", c.max_time},
           {"domain", c.domain}};
}

void from_json(const Json& j, IntegratorConfig& c) {
  check_keys(j, "IntegratorConfig", {"rtol", "atol", "max_step", "max_time", "domain"});
  read_opt(j, "rtol", c.rtol);
  read_opt(j, "atol", c.atol);
  read_opt(j, "max_step", c.max_step);
  read_opt(j, "max_time", c.max_time);
  read_opt(j, "domain", c.domain);
  c.validate();
}

void to_json(Json& j, const Section& s) {
  j = Json{{"base", s.base}, {"direction", s.direction}, {"x_min", s.x_min}, {"x_max", s.x_max}};
}

void from_json(const Json& j, Section& s) {
  check_keys(j, "Section", {"base", "direction", "x_min", "x_max"});
  read_opt(j, "base", s.base);
  read_opt(j, "direction", s.direction);
  read_opt(j, "x_min", s.x_min);
  read_opt(j, "x_max", s.x_max);
  s.validate();
}

void to_json(Json& j, const Trajectory& t) {
  j = Json{{"status", to_string(t.status)}, {"direction", t.direction}, {"times", t.times},
           {"points", points_json(t.points)}};
}

void to_json(Json& j, const ConicCurve& c) {
  j = Json::object();
  for (int s = 0; s < 6; ++s) j[std::string("c") + kSlotNames[s]] = c.coeffs[s];
}

void to_json(Json& j, const Line& l) { j = Json{{"normal", l.normal}, {"offset", l.offset}}; }

void to_json(Json& j, const IsoclineClass& c) {
  j = Json{{"tag", to_string(c.tag)}, {"lines", c.lines}, {"scale", c.scale}};
}

void to_json(Json& j, const SingularPoint& sp) {
  const auto& [l1, l2] = sp.eigenvalues;
  j = Json{{"location", sp.location},
           {"kind", to_string(sp.kind)},
           {"jacobian", sp.jacobian},
           {"eigenvalues", Json::array({Json::array({l1.real(), l1.imag()}), Json::array({l2.real(), l2.imag()})})},
           {"divergence", sp.divergence}};
}

void to_json(Json& j, const SignReport& r) {
  j = Json{{"negative", r.negative}, {"positive", r.positive}, {"zero", r.zero}, {"constant", r.constant},
           {"sign", r.sign}};
}

void to_json(Json& j, const CycleSearchConfig& c) {
  j = Json{{"integrator", c.integrator},         {"section", c.section},
           {"samples", c.samples},               {"stability_tol", c.stability_tol},
           {"zero_tol", c.zero_tol},             {"semistable_tol", c.semistable_tol},
           {"cluster_tol", c.cluster_tol},       {"root_width", c.root_width},
           {"boundary_samples", c.boundary_samples}, {"record_orbits", c.record_orbits}};
}

void from_json(const Json& j, CycleSearchConfig& c) {
  check_keys(j, "CycleSearchConfig",
             {"integrator", "section", "samples", "stability_tol", "zero_tol", "semistable_tol", "cluster_tol",
              "root_width", "boundary_samples", "record_orbits"});
  read_opt(j, "integrator", c.integrator);
  read_opt(j, "section", c.section);
  read_opt(j, "samples", c.samples);
  read_opt(j, "stability_tol", c.stability_tol);
  read_opt(j, "zero_tol", c.zero_tol);
  read_opt(j, "semistable_tol", c.semistable_tol);
  read_opt(j, "cluster_tol", c.cluster_tol);
  read_opt(j, "root_width", c.root_width);
  read_opt(j, "boundary_samples", c.boundary_samples);
  read_opt(j, "record_orbits", c.record_orbits);
}

void to_json(Json& j, const LimitCycleRecord& r) {
  j = Json{{"x", r.x},
           {"period", r.period},
           {"multiplier", r.multiplier},
           {"stability", to_string(r.stability)},
           {"multiplicity", r.multiplicity},
           {"residual", r.residual},
           {"winding_origin", r.winding_origin},
           {"encloses_only_origin", r.encloses_only_origin}};
  if (!r.orbit.points.empty()) j["orbit"] = points_json(r.orbit.points);
}

void to_json(Json& j, const DisplacementSample& s) {
  j = Json{{"x", s.x}, {"present", s.present}};
  if (s.present) {
    j["px"] = s.px;
    j["dx"] = s.dx;
  }
}

void to_json(Json& j, const CycleSearch& s) {
  j = Json{{"cycles", s.cycles}, {"center_annulus", s.center_annulus}};
  j["escape_boundary"] = s.escape_boundary ? Json(*s.escape_boundary) : Json(nullptr);
}

void to_json(Json& j, const CycleCount& c) {
  j = Json{{"count", c.count}, {"samples", c.samples}, {"node_origin", c.node_origin}, {"cycles", c.cycles}};
}

void to_json(Json& j, const FamilyPoint& p) {
  j = Json{{"mu", p.mu}, {"x", p.x}, {"multiplier", p.multiplier}, {"stability", to_string(p.stability)}};
}

void to_json(Json& j, const FamilyCurve& c) {
  j = Json{{"param", to_string(c.param)},
           {"termination", to_string(c.termination)},
           {"last_step", c.last_step},
           {"points", c.points}};
}

void to_json(Json& j, const StepPolicy& p) {
  j = Json{{"initial_step", p.initial_step}, {"max_step", p.max_step}, {"min_step", p.min_step},
           {"max_points", p.max_points}};
}

void from_json(const Json& j, StepPolicy& p) {
  check_keys(j, "StepPolicy", {"initial_step", "max_step", "min_step", "max_points"});
  read_opt(j, "initial_step", p.initial_step);
  read_opt(j, "max_step", p.max_step);
  read_opt(j, "min_step", p.min_step);
  read_opt(j, "max_points", p.max_points);
}

void to_json(Json& j, const SaddleFrame& f) {
  j = Json{{"location", f.location},
           {"unstable_eigenvalue", f.unstable_eigenvalue},
           {"unstable", f.unstable},
           {"stable_eigenvalue", f.stable_eigenvalue},
           {"stable", f.stable},
           {"divergence", f.divergence()},
           {"epsilon", f.epsilon}};
}

void to_json(Json& j, const LoopValue& v) {
  j = Json{{"param", to_string(v.param)},
           {"value", v.value},
           {"lo", v.lo},
           {"hi", v.hi},
           {"lo_outcome", to_string(v.lo_outcome)},
           {"hi_outcome", to_string(v.hi_outcome)},
           {"branch", to_string(v.branch)},
           {"evaluations", v.evaluations}};
}

void to_json(Json& j, const ScenarioConfig& c) {
  j = Json{{"cycles", c.cycles},
           {"beta_stage_trace", c.beta_stage_trace},
           {"lambda_stage_trace", c.lambda_stage_trace},
           {"beta_lo", c.beta_lo},
           {"beta_hi", c.beta_hi},
           {"loop_tol", c.loop_tol},
           {"delta_max", c.delta_max},
           {"delta_halvings", c.delta_halvings},
           {"lambda_margin", c.lambda_margin},
           {"order", to_string(c.order)}};
}

void from_json(const Json& j, ScenarioConfig& c) {
  check_keys(j, "ScenarioConfig",
             {"cycles", "beta_stage_trace", "lambda_stage_trace", "beta_lo", "beta_hi", "loop_tol", "delta_max",
              "delta_halvings", "lambda_margin", "order"});
  read_opt(j, "cycles", c.cycles);
  read_opt(j, "beta_stage_trace", c.beta_stage_trace);
  read_opt(j, "lambda_stage_trace", c.lambda_stage_trace);
  read_opt(j, "beta_lo", c.beta_lo);
  read_opt(j, "beta_hi", c.beta_hi);
  read_opt(j, "loop_tol", c.loop_tol);
  read_opt(j, "delta_max", c.delta_max);
  read_opt(j, "delta_halvings", c.delta_halvings);
  read_opt(j, "lambda_margin", c.lambda_margin);
  if (auto it = j.find("order"); it != j.end()) c.order = scenario_order_from_string(it->get<std::string>());
}

void to_json(Json& j, const StageReport& s) {
  j = Json{{"name", s.name}, {"system", s.system}, {"params", s.params}, {"census", s.census},
           {"origin_kind", s.origin_kind}};
  j["gamma_window"] = s.gamma_window ? Json(*s.gamma_window) : Json(nullptr);
  j["trace_window"] = s.trace_window ? Json(*s.trace_window) : Json(nullptr);
  j["loop"] = s.loop ? Json(*s.loop) : Json(nullptr);
  j["cycles"] = s.cycles;
  j["cycle_error"] = s.cycle_error ? Json(*s.cycle_error) : Json(nullptr);
  Json values = Json::object();
  for (const auto& [k, v] : s.values) values[k] = v;
  j["values"] = values;
}

void to_json(Json& j, const ScenarioReport& r) {
  j = Json{{"c", r.c},
           {"order", to_string(r.order)},
           {"beta_s", r.beta_s},
           {"lambda_s", r.lambda_s},
           {"delta", r.delta},
           {"final_params", r.final_params},
           {"cycle_count", r.cycle_count},
           {"nested", r.nested},
           {"inner_stable", r.inner_stable},
           {"outer_unstable", r.outer_unstable},
           {"enclose_only_origin", r.enclose_only_origin},
           {"stages", r.stages}};
}

void to_json(Json& j, const FoldRecord& r) {
  j = Json{{"lambda_fold", r.lambda_fold},
           {"lambda_fold_lo", r.lambda_fold_lo},
           {"x_fold", r.x_fold},
           {"semistable_lambda", r.semistable_lambda}};
  j["semistable"] = r.semistable ? Json(*r.semistable) : Json(nullptr);
  j["count_past_fold"] = r.count_past_fold;
  j["past_fold_lambda"] = r.past_fold_lambda;
  j["slopes_opposite"] = r.slopes_opposite;
  j["branch_gap"] = r.branch_gap;
  j["continuation_step"] = r.continuation_step;
  j["stable_branch"] = r.stable_branch;
  j["unstable_branch"] = r.unstable_branch;
}

void to_json(Json& j, const GridSpec& g) {
  j = Json{{"n", g.n},
           {"seed", g.seed},
           {"mode", to_string(g.mode)},
           {"c_min", g.c_min},
           {"c_max", g.c_max},
           {"gamma_max", g.gamma_max},
           {"b_min", g.b_min},
           {"b_max", g.b_max},
           {"near_focus_fraction", g.near_focus_fraction},
           {"trace_min", g.trace_min},
           {"trace_max", g.trace_max}};
  if (g.points) j["points"] = *g.points;
}

void from_json(const Json& j, GridSpec& g) {
  check_keys(j, "GridSpec",
             {"n", "seed", "mode", "c_min", "c_max", "gamma_max", "b_min", "b_max", "near_focus_fraction",
              "trace_min", "trace_max", "points"});
  read_opt(j, "n", g.n);
  read_opt(j, "seed", g.seed);
  if (auto it = j.find("mode"); it != j.end()) {
    const auto m = it->get<std::string>();
    if (m == "constrained") g.mode = SweepMode::Constrained;
    else if (m == "gamma_only") g.mode = SweepMode::GammaOnly;
    else throw std::invalid_argument("GridSpec: unknown mode '" + m + "'");
  }
  read_opt(j, "c_min", g.c_min);
  read_opt(j, "c_max", g.c_max);
  read_opt(j, "gamma_max", g.gamma_max);
  read_opt(j, "b_min", g.b_min);
  read_opt(j, "b_max", g.b_max);
  read_opt(j, "near_focus_fraction", g.near_focus_fraction);
  read_opt(j, "trace_min", g.trace_min);
  read_opt(j, "trace_max", g.trace_max);
  if (auto it = j.find("points"); it != j.end()) g.points = it->get<std::vector<CanonicalParamsII>>();
}

void to_json(Json& j, const SweepPoint& p) {
  j = Json{{"params", p.params}};
  j["count"] = p.count ? Json(*p.count) : Json(nullptr);
  j["node_origin"] = p.node_origin;
  j["records"] = p.cycles;
  if (!p.error.empty()) j["error"] = p.error;
}

void to_json(Json& j, const SweepSummary& s) {
  j = Json{{"points", s.points.size()}, {"max_count", s.max_count}};
  j["argmax"] = s.argmax ? Json(*s.argmax) : Json(nullptr);
  Json hist = Json::object();
  for (const auto& [k, v] : s.histogram) hist[std::to_string(k)] = v;
  j["histogram"] = hist;
  j["inconclusive"] = s.inconclusive;
  j["node_origin_points"] = s.node_origin_points;
}

}  // namespace qlc
