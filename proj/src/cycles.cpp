#include "qlc/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qlc/parallel.hpp"
#include "qlc/singular.hpp"

namespace qlc {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::SemiStable: return "SemiStable";
  }
  return "?";
}

std::string_view to_string(FamilyTermination t) {
  switch (t) {
    case FamilyTermination::RangeEnd: return "RangeEnd";
    case FamilyTermination::FoldDetected: return "FoldDetected";
    case FamilyTermination::ShrankToFocus: return "ShrankToFocus";
    case FamilyTermination::SeparatrixLoop: return "SeparatrixLoop";
  }
  return "?";
}

ReturnMap::ReturnMap(const QuadraticCoefficients& system, const Section& section, const IntegratorConfig& config)
    : system_(system), section_(section), config_(config) {
  section_.validate();
  config_.validate();
}

std::optional<double> ReturnMap::operator()(double x) const {
  const auto hit = first_section_crossing(system_, section_.point_at(x), section_, +1, config_);
  if (!hit) return std::nullopt;
  return section_.coordinate(hit->point);
}

std::optional<double> ReturnMap::displacement(double x) const {
  const auto px = (*this)(x);
  if (!px) return std::nullopt;
  return *px - x;
}

int winding_number(const std::vector<Vec2>& polygon, Vec2 q) {
  if (polygon.size() < 3) return 0;
  double total = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 a = polygon[i] - q;
    const Vec2 b = polygon[(i + 1) % polygon.size()] - q;
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

namespace {

constexpr double kTransversalAngle = 1e-3;

void require_surrounding_possible(const QuadraticCoefficients& sys) {
  const SingularKind kind = classify(sys, {0.0, 0.0});
  if (kind != SingularKind::StableFocus && kind != SingularKind::UnstableFocus &&
      kind != SingularKind::LinearCenter) {
    throw DomainError("no surrounding cycles possible");
  }
}

DisplacementSample sample_at(const ReturnMap& map, double x) {
  DisplacementSample s;
  s.x = x;
  if (const auto px = map(x)) {
    s.present = true;
    s.px = *px;
    s.dx = *px - x;
  }
  return s;
}

std::vector<DisplacementSample> sample_many(const ReturnMap& map, const std::vector<double>& xs) {
  return parallel_map(xs.size(), [&](std::size_t i) { return sample_at(map, xs[i]); });
}

double displacement_or_throw(const ReturnMap& map, double x) {
  const auto d = map.displacement(x);
  if (!d) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no return at x=" << x;
    throw DomainError(msg.str());
  }
  return *d;
}

// Zero of d inside a sign-change bracket, narrowed to `width` and further if
// the residual still exceeds zero_tol.
std::pair<double, double> refine_root(const ReturnMap& map, double lo, double dlo, double hi, double dhi,
                                      double width, double zero_tol) {
  auto f = [&](double x) { return displacement_or_throw(map, x); };
  auto solve = [&](double a, double fa, double b, double fb, double w) {
    std::uintmax_t iters = 200;
    auto tol = [w](double l, double r) { return std::abs(r - l) <= w; };
    return boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  };
  auto [a, b] = solve(lo, dlo, hi, dhi, width);
  double fa = f(a), fb = f(b);
  if (std::min(std::abs(fa), std::abs(fb)) > zero_tol && fa * fb < 0.0) {
    const double ulps = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
    std::tie(a, b) = solve(a, fa, b, fb, ulps);
    fa = f(a);
    fb = f(b);
  }
  return std::abs(fa) <= std::abs(fb) ? std::pair{a, fa} : std::pair{b, fb};
}

Stability stability_from(double multiplier, double tol) {
  if (multiplier < -tol) return Stability::Stable;
  if (multiplier > tol) return Stability::Unstable;
  return Stability::SemiStable;
}

// Central difference of d, kept below the escape boundary.
double multiplier_at(const ReturnMap& map, double x, std::optional<double> boundary) {
  double h = 1e-5 * x;
  if (boundary && *boundary > x) h = std::min(h, 0.5 * (*boundary - x));
  return (displacement_or_throw(map, x + h) - displacement_or_throw(map, x - h)) / (2.0 * h);
}

void attach_orbit(const CanonicalParamsII& p, const ReturnMap& map, const CycleSearchConfig& cfg,
                  LimitCycleRecord& rec) {
  const Vec2 start = map.section().point_at(rec.x);
  const Vec2 f = eval(map.system(), start);
  const double sine = std::abs(cross(map.section().direction, f)) / norm(f);
  if (!(sine >= std::sin(kTransversalAngle))) {
    std::ostringstream msg;
    msg << "section not transversal at x=" << rec.x;
    throw DomainError(msg.str());
  }
  auto orbit = orbit_to_section(map.system(), start, map.section(), +1, map.config());
  if (!orbit) throw DomainError("cycle orbit does not return");
  rec.period = orbit->times.back();
  rec.winding_origin = winding_number(orbit->points, {0.0, 0.0});
  bool only_origin = std::abs(rec.winding_origin) == 1;
  for (const auto& sp : finite_singular_points(p)) {
    if (sp.location == Vec2{0.0, 0.0}) continue;
    only_origin = only_origin && winding_number(orbit->points, sp.location) == 0;
  }
  rec.encloses_only_origin = only_origin;
  if (cfg.record_orbits) rec.orbit = std::move(*orbit);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (n - 1));
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

void sort_unique(std::vector<DisplacementSample>& s) {
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  s.erase(std::unique(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.x == b.x; }), s.end());
}

// Bisects the presence boundary between a returning sample and a
// non-returning one; returns the last returning x.
DisplacementSample presence_boundary(const ReturnMap& map, DisplacementSample in, DisplacementSample out) {
  for (int it = 0; it < 200; ++it) {
    if (std::abs(out.x - in.x) <= 1e-13 * std::max(std::abs(in.x), std::abs(out.x))) break;
    const DisplacementSample mid = sample_at(map, 0.5 * (in.x + out.x));
    if (mid.x == in.x || mid.x == out.x) break;
    (mid.present ? in : out) = mid;
  }
  return in;
}

}  // namespace

DisplacementSamples displacement_scan(const CanonicalParamsII& p, const Section& section, int n,
                                      const IntegratorConfig& config) {
  if (n < 16) throw std::invalid_argument("displacement_scan needs at least 16 samples");
  const auto sys = canonical_to_general(p);
  require_surrounding_possible(sys);
  const ReturnMap map(sys, section, config);
  return {sample_many(map, geometric_grid(section.x_min, section.x_max, n))};
}

CycleSearch find_cycles(const CanonicalParamsII& p, const CycleSearchConfig& cfg) {
  const auto sys = canonical_to_general(p);
  const ReturnMap map(sys, cfg.section, cfg.integrator);
  CycleSearch out;
  out.scan = displacement_scan(p, cfg.section, cfg.samples, cfg.integrator);
  auto& s = out.scan.samples;

  if (classify(sys, {0.0, 0.0}) == SingularKind::LinearCenter) {
    const bool flat = std::all_of(s.begin(), s.end(), [&](const auto& smp) {
      return !smp.present || std::abs(smp.dx) <= cfg.semistable_tol;
    });
    const bool any = std::any_of(s.begin(), s.end(), [](const auto& smp) { return smp.present; });
    if (flat && any) {
      out.center_annulus = true;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].present && !s[i + 1].present) {
          out.escape_boundary = presence_boundary(map, s[i], s[i + 1]).x;
          break;
        }
      }
      return out;
    }
  }

  // Resolve each presence transition and sample densely on its returning side,
  // where an outer cycle can sit exponentially close to the boundary.
  std::vector<std::pair<DisplacementSample, DisplacementSample>> transitions;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].present && !s[i + 1].present) transitions.push_back({s[i], s[i + 1]});
    if (!s[i].present && s[i + 1].present) transitions.push_back({s[i + 1], s[i]});
  }
  std::vector<double> extra_x;
  std::vector<DisplacementSample> extra;
  for (const auto& [in, outside] : transitions) {
    const DisplacementSample edge = presence_boundary(map, in, outside);
    extra.push_back(edge);
    if (outside.x > in.x && !out.escape_boundary) out.escape_boundary = edge.x;
    const double gap = std::abs(edge.x - in.x);
    const double side = in.x < edge.x ? -1.0 : 1.0;
    const int k = cfg.boundary_samples;
    for (int j = 0; j < k; ++j) {
      const double delta = 0.5 * gap * std::pow(1e-11 / (0.5 * gap), static_cast<double>(j) / std::max(1, k - 1));
      if (delta > 0.0 && delta < gap) extra_x.push_back(edge.x + side * delta);
    }
  }
  for (auto& e : sample_many(map, extra_x)) extra.push_back(e);
  s.insert(s.end(), extra.begin(), extra.end());
  sort_unique(s);

  struct Candidate {
    bool tangential;
    std::size_t i;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!s[i].present || !s[i + 1].present) continue;
    if (s[i].dx == 0.0 || (s[i].dx > 0.0) != (s[i + 1].dx > 0.0)) candidates.push_back({false, i});
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto &a = s[i - 1], &b = s[i], &c = s[i + 1];
    if (!a.present || !b.present || !c.present) continue;
    const bool same_sign = (a.dx > 0.0) == (b.dx > 0.0) && (b.dx > 0.0) == (c.dx > 0.0) && b.dx != 0.0;
    if (same_sign && std::abs(b.dx) < std::abs(a.dx) && std::abs(b.dx) < std::abs(c.dx)) {
      candidates.push_back({true, i});
    }
  }

  const auto boundary = out.escape_boundary;
  auto results = parallel_map(candidates.size(), [&](std::size_t k) -> std::optional<LimitCycleRecord> {
    const Candidate cand = candidates[k];
    LimitCycleRecord rec;
    if (!cand.tangential) {
      const auto &a = s[cand.i], &b = s[cand.i + 1];
      if (a.dx == 0.0) {
        rec.x = a.x;
        rec.residual = 0.0;
      } else {
        std::tie(rec.x, rec.residual) = refine_root(map, a.x, a.dx, b.x, b.dx, cfg.root_width, cfg.zero_tol);
      }
      rec.multiplier = multiplier_at(map, rec.x, boundary);
      rec.stability = stability_from(rec.multiplier, cfg.stability_tol);
      rec.multiplicity = rec.stability == Stability::SemiStable ? 2 : 1;
    } else {
      const double sign = s[cand.i].dx > 0.0 ? 1.0 : -1.0;
      auto g = [&](double x) { return sign * displacement_or_throw(map, x); };
      std::uintmax_t iters = 200;
      const auto [xm, gm] = boost::math::tools::brent_find_minima(g, s[cand.i - 1].x, s[cand.i + 1].x, 30, iters);
      if (!(gm <= cfg.semistable_tol)) return std::nullopt;
      // A tangency needs curvature; flat noise floors are rejected.
      const double h = 1e-3 * xm;
      const double d2 = (g(xm + h) - 2.0 * gm + g(xm - h)) / (h * h);
      if (!(std::abs(d2) > 1e-3)) return std::nullopt;
      rec.x = xm;
      rec.residual = sign * gm;
      rec.multiplier = multiplier_at(map, xm, boundary);
      rec.stability = Stability::SemiStable;
      rec.multiplicity = 2;
    }
    attach_orbit(p, map, cfg, rec);
    return rec;
  });

  for (auto& r : results) {
    if (r) out.cycles.push_back(std::move(*r));
  }
  std::sort(out.cycles.begin(), out.cycles.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  for (std::size_t i = 0; i + 1 < out.cycles.size(); ++i) {
    if (out.cycles[i + 1].x - out.cycles[i].x <= cfg.cluster_tol) throw DomainError("refine grid");
  }
  return out;
}

CycleCount count_cycles_around_origin(const CanonicalParamsII& p, const CycleSearchConfig& config) {
  const auto census = finite_singular_points(p);
  if (census.size() != 2) {
    std::ostringstream msg;
    msg << "expected exactly two finite singular points, found " << census.size();
    throw DomainError(msg.str());
  }
  for (const auto& sp : census) {
    if (norm(sp.location) == 0.0 && (sp.kind == SingularKind::StableNode || sp.kind == SingularKind::UnstableNode)) {
      CycleCount out;
      out.node_origin = true;
      return out;
    }
  }
  int previous = -1;  // -1: no comparable previous level
  CycleSearchConfig cfg = config;
  int n = 32;
  for (int level = 0; level <= 4; ++level, n *= 2) {
    cfg.samples = n;
    std::optional<CycleSearch> search;
    try {
      search = find_cycles(p, cfg);
    } catch (const DomainError& e) {
      if (std::string_view(e.what()) != "refine grid") throw;
    }
    if (!search) {
      previous = -1;
      continue;
    }
    const int count = static_cast<int>(search->cycles.size());
    if (count == previous) return {count, std::move(search->cycles), n};
    previous = count;
  }
  throw DomainError("inconclusive");
}

namespace {

struct Located {
  double x;
  double multiplier;
  Stability stability;
};

struct LocateFlags {
  bool hit_escape = false;
  bool hit_floor = false;
};

// Zero of d near `guess` whose sign pattern matches `want` (Stable: + to -,
// Unstable: - to +; nullopt accepts either), nearest to the guess.
std::optional<Located> locate(const ReturnMap& map, double guess, double width, std::optional<Stability> want,
                              const CycleSearchConfig& cfg, LocateFlags& flags) {
  const Section& sec = map.section();
  double lo = guess - width, hi = guess + width;
  if (lo <= sec.x_min) {
    lo = sec.x_min;
    flags.hit_floor = true;
  }
  hi = std::min(hi, sec.x_max);
  if (!(hi > lo)) return std::nullopt;
  constexpr int kGrid = 9;
  std::vector<double> xs(kGrid);
  for (int i = 0; i < kGrid; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kGrid - 1);
  const auto smp = sample_many(map, xs);

  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    if (!smp[i].present || !smp[i + 1].present) {
      flags.hit_escape = true;
      continue;
    }
    const bool down = smp[i].dx > 0.0 && smp[i + 1].dx <= 0.0;
    const bool up = smp[i].dx < 0.0 && smp[i + 1].dx >= 0.0;
    const bool ok = want == Stability::Stable ? down : want == Stability::Unstable ? up : (down || up);
    if (!ok) continue;
    const double dist = std::abs(0.5 * (smp[i].x + smp[i + 1].x) - guess);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  if (!best) return std::nullopt;
  const auto& a = smp[*best];
  const auto& b = smp[*best + 1];
  Located out;
  out.stability = a.dx > 0.0 ? Stability::Stable : Stability::Unstable;
  try {
    out.x = b.dx == 0.0 ? b.x : refine_root(map, a.x, a.dx, b.x, b.dx, cfg.root_width, cfg.zero_tol).first;
    out.multiplier = multiplier_at(map, out.x, std::nullopt);
  } catch (const DomainError&) {
    // The bracket or the difference stencil touched non-returning orbits.
    flags.hit_escape = true;
    return std::nullopt;
  }
  return out;
}

}  // namespace

FamilyCurve track_family(const CanonicalParamsII& p, RotationParam param, double x_start, double mu_end,
                         const StepPolicy& policy, const CycleSearchConfig& cfg) {
  FamilyCurve curve;
  curve.param = param;
  const double mu0 = get(p, param);
  const double dir = mu_end >= mu0 ? 1.0 : -1.0;
  auto map_at = [&](double mu) {
    return ReturnMap(canonical_to_general(with(p, param, mu)), cfg.section, cfg.integrator);
  };

  LocateFlags flags;
  std::optional<Located> start;
  for (int e = 0; e <= 3 && !start; ++e) {
    start = locate(map_at(mu0), x_start, 0.01 * x_start * std::pow(2.0, e), std::nullopt, cfg, flags);
  }
  if (!start) throw ContinuationError("no cycle near the starting point", curve);
  const Stability pattern = start->stability;
  curve.points.push_back({mu0, start->x, start->multiplier, pattern});

  double h = policy.initial_step;
  double max_multiplier = std::abs(start->multiplier);
  while (true) {
    if (static_cast<int>(curve.points.size()) >= policy.max_points) {
      throw ContinuationError("continuation exceeded the point budget", curve);
    }
    const FamilyPoint cur = curve.points.back();
    const double remaining = dir * (mu_end - cur.mu);
    if (remaining <= 0.0) {
      curve.termination = FamilyTermination::RangeEnd;
      return curve;
    }
    const double step = std::min(h, remaining);
    const double mu_next = step == remaining ? mu_end : cur.mu + dir * step;

    double slope = 0.0;
    double last_dx = 0.0;
    if (curve.points.size() >= 2) {
      const FamilyPoint& prev = curve.points[curve.points.size() - 2];
      slope = (cur.x - prev.x) / (cur.mu - prev.mu);
      // Scaled to the current step so that halving near a fold also narrows the bracket.
      last_dx = std::abs(cur.x - prev.x) * step / std::abs(cur.mu - prev.mu);
    }
    const double guess = cur.x + slope * (mu_next - cur.mu);
    const double width = std::max({2.0 * std::abs(guess - cur.x), 2.0 * last_dx, 1e-5 * cur.x});

    flags = {};
    std::optional<Located> next;
    const ReturnMap map = map_at(mu_next);
    for (int e = 0; e <= 3 && !next; ++e) {
      next = locate(map, guess, width * std::pow(2.0, e), pattern, cfg, flags);
    }
    if (next) {
      curve.points.push_back({mu_next, next->x, next->multiplier, stability_from(next->multiplier, cfg.stability_tol)});
      curve.last_step = std::hypot(mu_next - cur.mu, next->x - cur.x);
      max_multiplier = std::max(max_multiplier, std::abs(next->multiplier));
      h = std::min(1.5 * h, policy.max_step);
      continue;
    }

    h *= 0.5;
    if (h >= policy.min_step) continue;

    if (flags.hit_floor || cur.x <= 20.0 * cfg.section.x_min) {
      curve.termination = FamilyTermination::ShrankToFocus;
    } else if (flags.hit_escape) {
      curve.termination = FamilyTermination::SeparatrixLoop;
    } else if (std::abs(cur.multiplier) <= 0.1 * max_multiplier) {
      curve.termination = FamilyTermination::FoldDetected;
    } else {
      std::ostringstream msg;
      msg.precision(17);
      msg << "continuation step failure at " << to_string(param) << "=" << cur.mu << ", x=" << cur.x;
      throw ContinuationError(msg.str(), curve);
    }
    return curve;
  }
}

}  // namespace qlc
