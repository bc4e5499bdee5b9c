#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlc/cycles.hpp"
#include "qlc/separatrix.hpp"
#include "qlc/singular.hpp"

namespace qlc {

/// Order in which the rotation parameters are switched on.
enum class ScenarioOrder { GammaBetaLambda, BetaFirst, GammaLambdaFirst };

std::string_view to_string(ScenarioOrder order);
/// Accepts "default", "gamma-beta-lambda", "beta-first", "gamma-lambda-first".
ScenarioOrder scenario_order_from_string(std::string_view name);

struct ScenarioConfig {
  CycleSearchConfig cycles;
  /// beta + gamma once beta is switched on (the loop on the beta side).
  double beta_stage_trace = 0.05;
  /// beta + gamma used while lambda is switched on. With 0.05 the two-cycle
  /// window above lambda_S is narrower than double precision can resolve.
  double lambda_stage_trace = -0.9;
  double beta_lo = -3.0;
  double beta_hi = 0.0;
  double loop_tol = 1e-8;
  double delta_max = 0.01;
  int delta_halvings = 12;
  /// Distance kept from the two-singular-point boundary in lambda.
  double lambda_margin = 1e-2;
  ScenarioOrder order = ScenarioOrder::GammaBetaLambda;
};

struct StageReport {
  std::string name;    // hamiltonian, gamma, beta, lambda
  std::string system;  // which rotation parameters are on, e.g. "gamma+beta"
  CanonicalParamsII params;
  std::vector<SingularPoint> census;
  std::string origin_kind;
  std::optional<bool> gamma_window;
  std::optional<bool> trace_window;
  std::optional<LoopValue> loop;
  std::vector<LimitCycleRecord> cycles;
  std::optional<std::string> cycle_error;
  /// Scalar diagnostics specific to the stage.
  std::map<std::string, double> values;
};

struct ScenarioReport {
  double c = 0.0;
  ScenarioOrder order = ScenarioOrder::GammaBetaLambda;
  std::vector<StageReport> stages;
  CanonicalParamsII final_params;
  double beta_s = 0.0;
  double lambda_s = 0.0;
  double delta = 0.0;
  int cycle_count = 0;
  bool nested = false;
  bool inner_stable = false;
  bool outer_unstable = false;
  bool enclose_only_origin = false;
};

/// Raised when a stage check fails; the message names the stage and the
/// measured values.
class StageError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Staged construction of two nested cycles around the origin for nu = 1,
/// a = 1 and the given c > 1:
///   hamiltonian: census of two centres and two saddles;
///   gamma: gamma at the geometric mean of its window, unstable focus;
///   beta: loop value beta_S, then beta + gamma = beta_stage_trace below it
///         and one stable cycle;
///   lambda: beta + gamma = lambda_stage_trace, loop value lambda_S, then
///           lambda = lambda_S + delta with delta = min(delta_max, slack / 2)
///           halved until two cycles are found.
ScenarioReport run_two_cycle_construction(double c, const ScenarioConfig& config = {});

struct FoldRecord {
  double lambda_fold = 0.0;
  double lambda_fold_lo = 0.0;  // last lambda with two cycles
  double x_fold = 0.0;
  FamilyCurve stable_branch;
  FamilyCurve unstable_branch;
  std::optional<LimitCycleRecord> semistable;
  double semistable_lambda = 0.0;
  int count_past_fold = -1;
  double past_fold_lambda = 0.0;
  bool slopes_opposite = false;
  double branch_gap = 0.0;  // |x_stable - x_unstable| at the last points
  double continuation_step = 0.0;
};

class FoldError : public DomainError {
 public:
  FoldError(const std::string& what, FamilyCurve stable, FamilyCurve unstable)
      : DomainError(what), stable_(std::move(stable)), unstable_(std::move(unstable)) {}
  const FamilyCurve& stable() const { return stable_; }
  const FamilyCurve& unstable() const { return unstable_; }

 private:
  FamilyCurve stable_, unstable_;
};

/// Continues the inner stable and outer unstable cycles of `p` in lambda until
/// they merge, locates the merge value by bisection on the sign of
/// min d over the band between the branches, and confirms a SemiStable
/// record there and no cycles past it.
FoldRecord fold_exhibit(const CanonicalParamsII& p, double x_stable, double x_unstable,
                        const ScenarioConfig& config = {});

/// Largest beta + gamma + lambda keeping exactly two finite singular points and
/// the trace window, for nu = 1, a = 1.
double max_trace_two_points(double c, double gamma, double beta_plus_gamma);

enum class SweepMode { Constrained, GammaOnly };

struct GridSpec {
  int n = 500;
  std::uint64_t seed = 1;
  SweepMode mode = SweepMode::Constrained;
  double c_min = 1.0, c_max = 5.0;
  double gamma_max = 6.0;
  double b_min = -1.2, b_max = 0.3;  // beta + gamma
  /// Fraction of points drawn with the trace beta + gamma + lambda log-uniform
  /// in +-[trace_min, trace_max], where small cycles around the focus live.
  double near_focus_fraction = 0.5;
  double trace_min = 1e-4, trace_max = 0.3;
  /// When set, these points are used verbatim instead of sampling.
  std::optional<std::vector<CanonicalParamsII>> points;
};

struct SweepPoint {
  CanonicalParamsII params;
  std::optional<int> count;
  std::vector<LimitCycleRecord> cycles;
  bool node_origin = false;
  std::string error;  // non-empty when inconclusive
};

struct SweepSummary {
  std::vector<SweepPoint> points;
  int max_count = -1;
  std::optional<CanonicalParamsII> argmax;
  std::map<int, int> histogram;
  std::vector<std::size_t> inconclusive;
  int node_origin_points = 0;  // counted 0 because the origin is a node
};

/// Points satisfying the gamma and trace windows with exactly two finite
/// singular points, Latin-hypercube sampled and deterministic in the seed.
std::vector<CanonicalParamsII> sample_grid(const GridSpec& spec);

SweepSummary sweep_max_cycles(const GridSpec& spec, const CycleSearchConfig& config = {});

}  // namespace qlc
