#include "qlc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "qlc/parallel.hpp"

namespace qlc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

[[noreturn]] void fail(const std::string& stage, const std::string& what) {
  throw StageError(stage + ": " + what);
}

const SingularPoint* origin_of(const std::vector<SingularPoint>& census) {
  for (const auto& sp : census) {
    if (norm(sp.location) < 1e-12) return &sp;
  }
  return nullptr;
}

int count_kind(const std::vector<SingularPoint>& census, SingularKind kind) {
  return static_cast<int>(std::count_if(census.begin(), census.end(),
                                        [&](const SingularPoint& sp) { return sp.kind == kind; }));
}

StageReport describe(std::string name, std::string system, const CanonicalParamsII& p,
                     const ScenarioConfig& config) {
  StageReport st;
  st.name = std::move(name);
  st.system = std::move(system);
  st.params = p;
  st.census = finite_singular_points(p);
  if (const auto* o = origin_of(st.census)) st.origin_kind = std::string(to_string(o->kind));
  if (p.gamma != 0.0) {
    st.gamma_window = gamma_window_condition(p.c, p.gamma);
    if (p.gamma > 0.0 && 4.0 * p.c * p.gamma - 1.0 >= 0.0) {
      st.trace_window = trace_window_condition(p.c, p.gamma, p.beta, p.lambda);
    }
  }
  try {
    st.cycles = find_cycles(p, config.cycles).cycles;
  } catch (const DomainError& e) {
    st.cycle_error = e.what();
  }
  return st;
}

void require_two_points(const StageReport& st) {
  if (st.census.size() != 2) {
    fail(st.name, "expected 2 finite singular points, found " + std::to_string(st.census.size()));
  }
}

void require_origin(const StageReport& st, SingularKind kind) {
  if (st.origin_kind != to_string(kind)) {
    fail(st.name, "origin is " + st.origin_kind + ", expected " + std::string(to_string(kind)));
  }
}

bool record_nested_pair(ScenarioReport& r, const std::vector<LimitCycleRecord>& cycles) {
  r.cycle_count = static_cast<int>(cycles.size());
  if (cycles.size() != 2) return false;
  r.nested = cycles[0].x < cycles[1].x;
  r.inner_stable = cycles[0].stability == Stability::Stable;
  r.outer_unstable = cycles[1].stability == Stability::Unstable;
  r.enclose_only_origin = cycles[0].encloses_only_origin && cycles[1].encloses_only_origin;
  return r.nested && r.inner_stable && r.outer_unstable && r.enclose_only_origin;
}

}  // namespace

std::string_view to_string(ScenarioOrder order) {
  switch (order) {
    case ScenarioOrder::GammaBetaLambda: return "gamma-beta-lambda";
    case ScenarioOrder::BetaFirst: return "beta-first";
    case ScenarioOrder::GammaLambdaFirst: return "gamma-lambda-first";
  }
  return "?";
}

ScenarioOrder scenario_order_from_string(std::string_view name) {
  if (name == "default" || name == "gamma-beta-lambda") return ScenarioOrder::GammaBetaLambda;
  if (name == "beta-first") return ScenarioOrder::BetaFirst;
  if (name == "gamma-lambda-first") return ScenarioOrder::GammaLambdaFirst;
  throw std::invalid_argument("unknown scenario order: " + std::string(name));
}

double max_trace_two_points(double c, double gamma, double beta_plus_gamma) {
  const double one_minus_b = 1.0 - beta_plus_gamma;
  return std::min(trace_window(c, gamma).second, c * gamma - 0.25 * one_minus_b * one_minus_b);
}

ScenarioReport run_two_cycle_construction(double c, const ScenarioConfig& config) {
  if (!(c > 0.0)) throw DomainError("c must be positive");
  const auto window = gamma_window(c);
  if (!(window.first < window.second)) fail("gamma", "gamma window is empty for c = " + fmt(c));

  ScenarioReport r;
  r.c = c;
  r.order = config.order;
  const IntegratorConfig& ic = config.cycles.integrator;

  // Hamiltonian member.
  const CanonicalParamsII ham = hamiltonian_params(c);
  StageReport s_ham = describe("hamiltonian", "none", ham, config);
  if (s_ham.census.size() != 4 || count_kind(s_ham.census, SingularKind::LinearCenter) != 2 ||
      count_kind(s_ham.census, SingularKind::Saddle) != 2) {
    fail("hamiltonian", "expected 2 linear centres and 2 saddles");
  }

  // gamma alone.
  CanonicalParamsII pg = ham;
  pg.gamma = std::sqrt(window.first * window.second);
  StageReport s_gamma = describe("gamma", "gamma", pg, config);
  s_gamma.values["gamma_window_lo"] = window.first;
  s_gamma.values["gamma_window_hi"] = window.second;
  if (!*s_gamma.gamma_window) fail("gamma", "gamma = " + fmt(pg.gamma) + " outside its window");
  require_two_points(s_gamma);
  require_origin(s_gamma, SingularKind::UnstableFocus);

  // beta: loop value, then a small positive trace below it.
  const LoopValue beta_loop =
      find_loop_parameter(pg, RotationParam::Beta, config.beta_lo, config.beta_hi, config.loop_tol, ic);
  r.beta_s = beta_loop.value;
  CanonicalParamsII pb = pg;
  pb.beta = config.beta_stage_trace - pg.gamma;
  if (!(pb.beta < r.beta_s)) {
    fail("beta", "beta = " + fmt(pb.beta) + " is not below beta_S = " + fmt(r.beta_s));
  }
  StageReport s_beta = describe("beta", "gamma+beta", pb, config);
  s_beta.loop = beta_loop;
  s_beta.values["beta_s"] = r.beta_s;
  require_two_points(s_beta);
  require_origin(s_beta, SingularKind::UnstableFocus);
  if (s_beta.cycle_error) fail("beta", *s_beta.cycle_error);
  if (s_beta.cycles.size() != 1 || s_beta.cycles[0].stability != Stability::Stable) {
    fail("beta", "expected one stable cycle, found " + std::to_string(s_beta.cycles.size()));
  }

  // lambda: loop value at a negative trace, then an offset above it.
  CanonicalParamsII pl = pg;
  const double b = config.lambda_stage_trace;
  pl.beta = b - pg.gamma;
  const double s_max = max_trace_two_points(c, pg.gamma, b);
  const double lambda_hi = s_max - b - config.lambda_margin;
  if (!(lambda_hi > 0.0)) fail("lambda", "no admissible lambda range");
  const LoopValue lambda_loop = find_loop_parameter(pl, RotationParam::Lambda, 0.0, lambda_hi, config.loop_tol, ic);
  r.lambda_s = lambda_loop.value;
  const double slack = trace_window(c, pg.gamma).second - (b + r.lambda_s);
  double delta = std::min(config.delta_max, 0.5 * slack);
  std::vector<double> tried;
  int count = -1;
  for (int k = 0; k <= config.delta_halvings; ++k, delta *= 0.5) {
    tried.push_back(delta);
    try {
      count = count_cycles_around_origin(with(pl, RotationParam::Lambda, r.lambda_s + delta), config.cycles).count;
    } catch (const DomainError&) {
      count = -1;
    }
    if (count == 2) break;
  }
  if (count != 2) fail("lambda", "no offset above lambda_S = " + fmt(r.lambda_s) + " gives two cycles");
  r.delta = delta;
  pl.lambda = r.lambda_s + delta;
  r.final_params = pl;

  StageReport s_lambda = describe("lambda", "gamma+beta+lambda", pl, config);
  s_lambda.loop = lambda_loop;
  s_lambda.values["lambda_s"] = r.lambda_s;
  s_lambda.values["delta"] = delta;
  s_lambda.values["delta_attempts"] = static_cast<double>(tried.size());
  s_lambda.values["trace_slack"] = slack;
  s_lambda.values["lambda_bracket_hi"] = lambda_hi;
  require_two_points(s_lambda);
  if (!s_lambda.trace_window.value_or(false)) fail("lambda", "trace window violated");
  if (s_lambda.cycle_error) fail("lambda", *s_lambda.cycle_error);

  switch (config.order) {
    case ScenarioOrder::GammaBetaLambda:
      r.stages = {s_ham, s_gamma, s_beta, s_lambda};
      break;
    case ScenarioOrder::BetaFirst: {
      CanonicalParamsII q = ham;
      q.beta = pl.beta;
      StageReport s1 = describe("beta", "beta", q, config);
      q.gamma = pl.gamma;
      StageReport s2 = describe("gamma", "beta+gamma", q, config);
      r.stages = {s_ham, s1, s2, s_lambda};
      break;
    }
    case ScenarioOrder::GammaLambdaFirst: {
      CanonicalParamsII q = pg;
      q.lambda = pl.lambda;
      StageReport s2 = describe("lambda", "gamma+lambda", q, config);
      StageReport s3 = s_lambda;
      s3.name = "beta";
      s3.system = "gamma+lambda+beta";
      r.stages = {s_ham, s_gamma, s2, s3};
      break;
    }
  }

  if (!record_nested_pair(r, s_lambda.cycles)) {
    fail("lambda", "final cycles are not a nested stable/unstable pair around the origin");
  }
  return r;
}

FoldRecord fold_exhibit(const CanonicalParamsII& p, double x_stable, double x_unstable,
                        const ScenarioConfig& config) {
  if (!(x_stable < x_unstable)) throw DomainError("expected the stable cycle inside the unstable one");
  const double b = p.beta + p.gamma;
  const double lambda_end = max_trace_two_points(p.c, p.gamma, b) - b;
  StepPolicy policy;
  policy.initial_step = 1e-4;
  policy.max_step = 1e-3;

  FoldRecord r;
  r.stable_branch = track_family(p, RotationParam::Lambda, x_stable, lambda_end, policy, config.cycles);
  r.unstable_branch = track_family(p, RotationParam::Lambda, x_unstable, lambda_end, policy, config.cycles);
  if (r.stable_branch.termination != FamilyTermination::FoldDetected ||
      r.unstable_branch.termination != FamilyTermination::FoldDetected) {
    throw FoldError("no fold in range", r.stable_branch, r.unstable_branch);
  }
  const FamilyPoint& ls = r.stable_branch.points.back();
  const FamilyPoint& lu = r.unstable_branch.points.back();
  r.branch_gap = std::abs(ls.x - lu.x);
  r.continuation_step = std::max(r.stable_branch.last_step, r.unstable_branch.last_step);

  // Opposite slopes over the last five points of each branch.
  auto slope_sign = [](const FamilyCurve& c) {
    const auto& pts = c.points;
    if (pts.size() < 5) return 0;
    int sign = 0;
    for (std::size_t k = pts.size() - 4; k < pts.size(); ++k) {
      const double s = (pts[k].x - pts[k - 1].x) / (pts[k].mu - pts[k - 1].mu);
      const int sk = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
      if (sk == 0 || (sign != 0 && sk != sign)) return 0;
      sign = sk;
    }
    return sign;
  };
  const int ss = slope_sign(r.stable_branch);
  const int su = slope_sign(r.unstable_branch);
  r.slopes_opposite = ss != 0 && su != 0 && ss != su;

  // The sign of min d over the band between the branches changes at the fold.
  const double pad = std::max(r.branch_gap, 1e-4);
  const double band_lo = std::min(ls.x, lu.x) - pad;
  const double band_hi = std::max(ls.x, lu.x) + pad;
  auto band_min = [&](double lambda) {
    const ReturnMap map(canonical_to_general(with(p, RotationParam::Lambda, lambda)), config.cycles.section,
                        config.cycles.integrator);
    auto d = [&](double x) {
      const auto v = map.displacement(x);
      if (!v) throw DomainError("orbit does not return inside the fold band");
      return *v;
    };
    const auto m = boost::math::tools::brent_find_minima(d, band_lo, band_hi, 40);
    return std::pair{m.second, m.first};
  };
  double lo = std::max(ls.mu, lu.mu);
  if (!(band_min(lo).first < 0.0)) lo = std::min(ls.mu, lu.mu);
  if (!(band_min(lo).first < 0.0)) throw FoldError("two cycles lost before the fold", r.stable_branch, r.unstable_branch);
  double step = 1e-6;
  double hi = lo + step;
  while (band_min(hi).first < 0.0) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (hi > lambda_end) throw FoldError("no fold in range", r.stable_branch, r.unstable_branch);
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (band_min(mid).first < 0.0 ? lo : hi) = mid;
  }
  r.lambda_fold_lo = lo;
  r.lambda_fold = hi;
  r.x_fold = band_min(hi).second;

  // SemiStable confirmation just past the merge.
  r.semistable_lambda = hi;
  const CycleSearch at_fold = find_cycles(with(p, RotationParam::Lambda, hi), config.cycles);
  for (const auto& cyc : at_fold.cycles) {
    if (cyc.stability == Stability::SemiStable && std::abs(cyc.x - r.x_fold) < 1e-3) r.semistable = cyc;
  }

  r.past_fold_lambda = std::min(r.lambda_fold + 1e-3, 0.5 * (r.lambda_fold + lambda_end));
  try {
    r.count_past_fold = count_cycles_around_origin(with(p, RotationParam::Lambda, r.past_fold_lambda),
                                                   config.cycles).count;
  } catch (const DomainError&) {
    r.count_past_fold = -1;
  }
  return r;
}

std::vector<CanonicalParamsII> sample_grid(const GridSpec& spec) {
  std::vector<CanonicalParamsII> out;
  if (spec.points) {
    out = *spec.points;
    return out;
  }
  if (spec.n <= 0) return out;
  if (!(spec.c_min >= 1.0 && spec.c_min < spec.c_max)) throw std::invalid_argument("bad c range");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int dims = 5;
  constexpr double kBand = 1e-6;

  auto accept = [&](const std::vector<double>& u, std::size_t index) -> std::optional<CanonicalParamsII> {
    CanonicalParamsII p;
    p.nu = 1;
    p.a = 1.0;
    p.c = spec.c_min + (spec.c_max - spec.c_min) * u[0];
    if (p.c <= 1.0 + kBand) return std::nullopt;
    const auto [glo, ghi_window] = gamma_window(p.c);
    const double ghi = std::min(ghi_window, spec.gamma_max);
    if (!(glo > 0.0 && glo < ghi)) return std::nullopt;
    p.gamma = glo * std::pow(ghi / glo, u[1]);
    if (spec.mode == SweepMode::GammaOnly) {
      p.beta = 0.0;
      p.lambda = 0.0;
    } else {
      const double b = spec.b_min + (spec.b_max - spec.b_min) * u[2];
      p.beta = b - p.gamma;
      const double s_lo = trace_window(p.c, p.gamma).first;
      const double s_hi = max_trace_two_points(p.c, p.gamma, b);
      double s = 0.0;
      // Low-discrepancy split between near-focus and uniform trace draws.
      const bool near_focus = std::fmod(static_cast<double>(index) * 0.6180339887498949, 1.0) <
                              spec.near_focus_fraction;
      if (near_focus) {
        const double mag = spec.trace_min * std::pow(spec.trace_max / spec.trace_min, u[3]);
        s = u[4] < 0.5 ? -mag : mag;
      } else {
        s = s_lo + (s_hi - s_lo) * u[3];
      }
      if (!(s > s_lo + kBand && s < s_hi - kBand)) return std::nullopt;
      p.lambda = s - b;
    }
    if (!gamma_window_condition(p.c, p.gamma)) return std::nullopt;
    if (!trace_window_condition(p.c, p.gamma, p.beta, p.lambda)) return std::nullopt;
    const auto [wlo, whi] = gamma_window(p.c);
    if (p.gamma < wlo + kBand || p.gamma > whi - kBand) return std::nullopt;
    if (finite_singular_points(p).size() != 2) return std::nullopt;
    return p;
  };

  std::size_t drawn = 0;
  for (int batch = 0; static_cast<int>(out.size()) < spec.n; ++batch) {
    if (batch > 1000) throw DomainError("grid constraints reject nearly every sample");
    const int m = spec.n;
    std::vector<std::vector<double>> strata(dims, std::vector<double>(m));
    for (auto& col : strata) {
      for (int i = 0; i < m; ++i) col[i] = (i + unit(rng)) / m;
      std::shuffle(col.begin(), col.end(), rng);
    }
    for (int i = 0; i < m && static_cast<int>(out.size()) < spec.n; ++i) {
      std::vector<double> u(dims);
      for (int d = 0; d < dims; ++d) u[d] = strata[d][i];
      if (auto p = accept(u, drawn++)) out.push_back(*p);
    }
  }
  return out;
}

SweepSummary sweep_max_cycles(const GridSpec& spec, const CycleSearchConfig& config) {
  const auto grid = sample_grid(spec);
  CycleSearchConfig cfg = config;
  cfg.record_orbits = false;
  SweepSummary s;
  s.points = parallel_map(grid.size(), [&](std::size_t i) {
    SweepPoint pt;
    pt.params = grid[i];
    try {
      const CycleCount cc = count_cycles_around_origin(grid[i], cfg);
      pt.count = cc.count;
      pt.cycles = cc.cycles;
      pt.node_origin = cc.node_origin;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    return pt;
  });
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& pt = s.points[i];
    if (!pt.count) {
      s.inconclusive.push_back(i);
      continue;
    }
    ++s.histogram[*pt.count];
    if (pt.node_origin) ++s.node_origin_points;
    if (*pt.count > s.max_count) {
      s.max_count = *pt.count;
      s.argmax = pt.params;
    }
  }
  return s;
}

}  // namespace qlc
