#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlc/json_io.hpp"
#include "svg.hpp"

namespace qlc::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SystemSpec {
  int nu = 1;
  double lambda = 0.0, beta = 0.0, gamma = 0.0, a = 1.0, c = 2.0;
  std::string params_file;
  std::string coeffs_file;
  std::vector<CLI::Option*> flags;

  bool any_flag() const {
    return std::any_of(flags.begin(), flags.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
};

void add_system_options(CLI::App* sub, SystemSpec& s, bool allow_coeffs) {
  s.flags = {
      sub->add_option("--nu", s.nu, "canonical nu (0 or 1)")->capture_default_str(),
      sub->add_option("--lambda", s.lambda, "canonical lambda")->capture_default_str(),
      sub->add_option("--beta", s.beta, "canonical beta")->capture_default_str(),
      sub->add_option("--gamma", s.gamma, "canonical gamma")->capture_default_str(),
      sub->add_option("--a", s.a, "canonical a")->capture_default_str(),
      sub->add_option("--c", s.c, "canonical c")->capture_default_str(),
  };
  sub->add_option("--params", s.params_file, "canonical parameters as a JSON file");
  if (allow_coeffs) sub->add_option("--coeffs", s.coeffs_file, "raw quadratic coefficients as a JSON file");
}

CanonicalParamsII canonical(const SystemSpec& s) {
  if (!s.coeffs_file.empty()) throw UsageError("--coeffs is not accepted by this subcommand");
  if (!s.params_file.empty()) {
    if (s.any_flag()) throw UsageError("give either --params or parameter flags, not both");
    return parse_json(read_file(s.params_file)).get<CanonicalParamsII>();
  }
  CanonicalParamsII p;
  p.nu = s.nu;
  p.lambda = s.lambda;
  p.beta = s.beta;
  p.gamma = s.gamma;
  p.a = s.a;
  p.c = s.c;
  p.validate();
  return p;
}

QuadraticCoefficients general(const SystemSpec& s) {
  if (s.coeffs_file.empty()) return canonical_to_general(canonical(s));
  if (!s.params_file.empty() || s.any_flag()) throw UsageError("give exactly one system specification");
  return parse_json(read_file(s.coeffs_file)).get<QuadraticCoefficients>();
}

struct IntegratorFlags {
  std::optional<double> rtol, atol, max_step, max_time;

  void add(CLI::App* sub) {
    sub->add_option("--rtol", rtol, "relative tolerance");
    sub->add_option("--atol", atol, "absolute tolerance");
    sub->add_option("--max-step", max_step, "largest integration step");
    sub->add_option("--max-time", max_time, "integration time budget per orbit");
  }
  void apply(IntegratorConfig& c) const {
    if (rtol) c.rtol = *rtol;
    if (atol) c.atol = *atol;
    if (max_step) c.max_step = *max_step;
    if (max_time) c.max_time = *max_time;
    c.validate();
  }
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file_atomic(path, content);
  }
}

std::string json_text(const Json& j) { return dump_json(j) + "\n"; }

template <class T>
T load_config(const std::string& path) {
  T cfg{};
  if (!path.empty()) cfg = parse_json(read_file(path)).get<T>();
  return cfg;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }

std::vector<Line> isocline_lines(const QuadraticCoefficients& sys) {
  std::vector<Line> out;
  const auto pair = nullcline_conics(sys);
  for (const auto* conic : {&pair.vertical, &pair.horizontal}) {
    const IsoclineClass cls = classify_conic(*conic);
    out.insert(out.end(), cls.lines.begin(), cls.lines.end());
  }
  return out;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Quadratic systems with two parallel line-isoclines", "qlc"};
  app.require_subcommand(1);
  std::function<void()> action;

  // singular
  SystemSpec sing_sys;
  std::string sing_out;
  auto* sing = app.add_subcommand("singular", "finite singular points as JSON");
  add_system_options(sing, sing_sys, false);
  sing->add_option("--out", sing_out, "output file (default stdout)");
  sing->callback([&] {
    action = [&] {
      const auto p = canonical(sing_sys);
      Json j{{"params", p}, {"points", finite_singular_points(p)}};
      emit(sing_out, json_text(j));
    };
  });

  // check-conditions
  double cc_c = 0.0, cc_gamma = 0.0, cc_beta = 0.0, cc_lambda = 0.0;
  auto* cc = app.add_subcommand("check-conditions", "gamma window and trace window conditions as JSON");
  cc->add_option("--c", cc_c, "c")->required();
  cc->add_option("--gamma", cc_gamma, "gamma")->required();
  cc->add_option("--beta", cc_beta, "beta")->capture_default_str();
  cc->add_option("--lambda", cc_lambda, "lambda")->capture_default_str();
  cc->callback([&] {
    action = [&] {
      // A window with no real endpoints is reported as null.
      auto defined = [](auto&& test) -> Json {
        try {
          return test();
        } catch (const DomainError&) {
          return nullptr;
        }
      };
      Json j{{"gamma_window", defined([&] { return gamma_window_condition(cc_c, cc_gamma); })},
             {"trace_window", defined([&] { return trace_window_condition(cc_c, cc_gamma, cc_beta, cc_lambda); })}};
      emit("", dump_json(j, -1) + "\n");
    };
  });

  // isoclines
  SystemSpec iso_sys;
  std::string iso_out;
  auto* iso = app.add_subcommand("isoclines", "classification of the nullcline conics as JSON");
  add_system_options(iso, iso_sys, true);
  iso->add_option("--out", iso_out, "output file (default stdout)");
  iso->callback([&] {
    action = [&] {
      const auto sys = general(iso_sys);
      const auto pair = nullcline_conics(sys);
      Json j{{"system", sys},
             {"vertical", {{"conic", pair.vertical}, {"class", classify_conic(pair.vertical)}}},
             {"horizontal", {{"conic", pair.horizontal}, {"class", classify_conic(pair.horizontal)}}}};
      emit(iso_out, json_text(j));
    };
  });

  // rotation
  SystemSpec rot_sys;
  PortraitView rot_view;
  int rot_n = 11;
  std::string rot_out;
  auto* rot = app.add_subcommand("rotation", "rotation deltas on a grid as CSV");
  add_system_options(rot, rot_sys, false);
  rot->add_option("--x-min", rot_view.x_min, "window x min")->capture_default_str();
  rot->add_option("--x-max", rot_view.x_max, "window x max")->capture_default_str();
  rot->add_option("--y-min", rot_view.y_min, "window y min")->capture_default_str();
  rot->add_option("--y-max", rot_view.y_max, "window y max")->capture_default_str();
  rot->add_option("--n", rot_n, "grid points per axis")->capture_default_str()->check(CLI::Range(2, 10000));
  rot->add_option("--out", rot_out, "output file (default stdout)");
  rot->callback([&] {
    action = [&] {
      const auto p = canonical(rot_sys);
      std::string csv = "x,y,delta_lambda,delta_beta,delta_gamma\n";
      for (int i = 0; i < rot_n; ++i) {
        for (int k = 0; k < rot_n; ++k) {
          const Vec2 z{rot_view.x_min + (rot_view.x_max - rot_view.x_min) * k / (rot_n - 1),
                       rot_view.y_min + (rot_view.y_max - rot_view.y_min) * i / (rot_n - 1)};
          csv += csv_number(z.x) + "," + csv_number(z.y);
          for (auto param : kRotationParams) csv += "," + csv_number(delta(param, p, z));
          csv += "\n";
        }
      }
      emit(rot_out, csv);
    };
  });

  // portrait
  SystemSpec por_sys;
  IntegratorFlags por_int;
  PortraitView por_view;
  int por_grid = 6;
  double por_duration = 20.0;
  bool por_both = false;
  std::string por_out, por_svg;
  auto* por = app.add_subcommand("portrait", "orbits from a grid of seeds as CSV and SVG");
  add_system_options(por, por_sys, true);
  por_int.add(por);
  por->add_option("--x-min", por_view.x_min, "window x min")->capture_default_str();
  por->add_option("--x-max", por_view.x_max, "window x max")->capture_default_str();
  por->add_option("--y-min", por_view.y_min, "window y min")->capture_default_str();
  por->add_option("--y-max", por_view.y_max, "window y max")->capture_default_str();
  por->add_option("--grid", por_grid, "seeds per axis")->capture_default_str()->check(CLI::Range(1, 200));
  por->add_option("--duration", por_duration, "integration time per orbit")->capture_default_str();
  por->add_flag("--both", por_both, "also integrate backward in time");
  por->add_option("--out", por_out, "CSV output (default stdout)");
  por->add_option("--svg", por_svg, "SVG output");
  por->callback([&] {
    action = [&] {
      if (!(por_view.x_min < por_view.x_max && por_view.y_min < por_view.y_max)) throw UsageError("empty view");
      if (!(por_duration > 0.0)) throw UsageError("--duration must be positive");
      const auto sys = general(por_sys);
      IntegratorConfig ic;
      por_int.apply(ic);
      std::vector<Trajectory> orbits;
      for (int i = 0; i < por_grid; ++i) {
        for (int k = 0; k < por_grid; ++k) {
          const Vec2 seed{por_view.x_min + (por_view.x_max - por_view.x_min) * (k + 0.5) / por_grid,
                          por_view.y_min + (por_view.y_max - por_view.y_min) * (i + 0.5) / por_grid};
          orbits.push_back(integrate(sys, seed, por_duration, ic));
          if (por_both) orbits.push_back(integrate(sys, seed, -por_duration, ic));
        }
      }
      std::string csv = "t,x,y,orbit_id\n";
      for (std::size_t id = 0; id < orbits.size(); ++id) {
        const auto& o = orbits[id];
        for (std::size_t s = 0; s < o.size(); ++s) {
          csv += csv_number(o.direction * o.times[s]) + "," + csv_number(o.points[s].x) + "," +
                 csv_number(o.points[s].y) + "," + std::to_string(id) + "\n";
        }
      }
      emit(por_out, csv);
      if (!por_svg.empty()) {
        std::vector<SingularPoint> points;
        if (por_sys.coeffs_file.empty()) points = finite_singular_points(canonical(por_sys));
        write_file_atomic(por_svg, render_svg(por_view, orbits, isocline_lines(sys), points));
      }
    };
  });

  // cycles
  SystemSpec cyc_sys;
  IntegratorFlags cyc_int;
  std::string cyc_config, cyc_out, cyc_csv;
  std::optional<int> cyc_samples;
  auto* cyc = app.add_subcommand("cycles", "limit cycles around the origin: samples as CSV, records as JSON");
  add_system_options(cyc, cyc_sys, false);
  cyc_int.add(cyc);
  cyc->add_option("--config", cyc_config, "CycleSearchConfig JSON file");
  cyc->add_option("--samples", cyc_samples, "section samples");
  cyc->add_option("--out", cyc_out, "JSON output (default stdout)");
  cyc->add_option("--csv", cyc_csv, "displacement samples as CSV (x, Px, dx)");
  cyc->callback([&] {
    action = [&] {
      const auto p = canonical(cyc_sys);
      auto cfg = load_config<CycleSearchConfig>(cyc_config);
      cyc_int.apply(cfg.integrator);
      if (cyc_samples) cfg.samples = *cyc_samples;
      const CycleSearch search = find_cycles(p, cfg);
      if (!cyc_csv.empty()) {
        std::string csv = "x,Px,dx\n";
        for (const auto& s : search.scan.samples) {
          csv += csv_number(s.x) + "," + (s.present ? csv_number(s.px) : "") + "," +
                 (s.present ? csv_number(s.dx) : "") + "\n";
        }
        write_file_atomic(cyc_csv, csv);
      }
      Json j{{"params", p}, {"config", cfg}};
      j.update(Json(search));
      emit(cyc_out, json_text(j));
    };
  });

  // loop
  SystemSpec loop_sys;
  IntegratorFlags loop_int;
  std::string loop_param = "beta", loop_out;
  double loop_lo = 0.0, loop_hi = 0.0, loop_tol = 1e-8, loop_eps = 1e-6;
  auto* loop = app.add_subcommand("loop", "parameter value of a separatrix loop by bisection");
  add_system_options(loop, loop_sys, false);
  loop_int.add(loop);
  loop->add_option("--param", loop_param, "lambda, beta or gamma")->capture_default_str();
  loop->add_option("--lo", loop_lo, "bracket start")->required();
  loop->add_option("--hi", loop_hi, "bracket end")->required();
  loop->add_option("--tol", loop_tol, "bracket width")->capture_default_str();
  loop->add_option("--epsilon", loop_eps, "offset along the unstable eigenvector")->capture_default_str();
  loop->add_option("--out", loop_out, "JSON output (default stdout)");
  loop->callback([&] {
    action = [&] {
      const auto p = canonical(loop_sys);
      IntegratorConfig ic;
      loop_int.apply(ic);
      const auto param = rotation_param_from_string(loop_param);
      emit(loop_out, json_text(Json(find_loop_parameter(p, param, loop_lo, loop_hi, loop_tol, ic, loop_eps))));
    };
  });

  // scenario
  double sc_c = 2.0;
  std::string sc_order = "default", sc_config, sc_out;
  bool sc_fold = false;
  IntegratorFlags sc_int;
  auto* sc = app.add_subcommand("scenario", "staged construction of two nested limit cycles");
  sc->add_option("--c", sc_c, "c")->capture_default_str();
  sc->add_option("--order", sc_order, "default, beta-first or gamma-lambda-first")->capture_default_str();
  sc->add_option("--config", sc_config, "ScenarioConfig JSON file");
  sc->add_flag("--fold", sc_fold, "continue the two cycles in lambda to their fold");
  sc_int.add(sc);
  sc->add_option("--out", sc_out, "JSON output (default stdout)");
  sc->callback([&] {
    action = [&] {
      auto cfg = load_config<ScenarioConfig>(sc_config);
      sc_int.apply(cfg.cycles.integrator);
      if (sc->count("--order") > 0 || sc_config.empty()) cfg.order = scenario_order_from_string(sc_order);
      const ScenarioReport report = run_two_cycle_construction(sc_c, cfg);
      Json j = report;
      if (sc_fold) {
        const auto& cycles = report.stages.back().cycles;
        j["fold"] = fold_exhibit(report.final_params, cycles[0].x, cycles[1].x, cfg);
      }
      emit(sc_out, json_text(j));
    };
  });

  // sweep
  std::string sw_grid, sw_config, sw_out, sw_summary;
  auto* sw = app.add_subcommand("sweep", "cycle counts over a parameter grid as JSON lines");
  sw->add_option("--grid", sw_grid, "GridSpec JSON file")->required();
  sw->add_option("--config", sw_config, "CycleSearchConfig JSON file");
  sw->add_option("--out", sw_out, "JSON lines output (default stdout)");
  sw->add_option("--summary", sw_summary, "summary JSON output (default stderr)");
  sw->callback([&] {
    action = [&] {
      const auto grid = parse_json(read_file(sw_grid)).get<GridSpec>();
      const auto cfg = load_config<CycleSearchConfig>(sw_config);
      const SweepSummary summary = sweep_max_cycles(grid, cfg);
      std::string lines;
      for (const auto& pt : summary.points) lines += dump_json(Json(pt), -1) + "\n";
      emit(sw_out, lines);
      const std::string text = json_text(Json(summary));
      if (sw_summary.empty()) std::cerr << text;
      else write_file_atomic(sw_summary, text);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qlc::cli
