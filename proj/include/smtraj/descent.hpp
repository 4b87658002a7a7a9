#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "smtraj/descent_config.hpp"
#include "smtraj/gradients.hpp"

namespace smtraj {

enum class Phase { fast, slow };
enum class StopReason { tol_I, tol_grad, max_iters, stalled, nonfinite };

std::string_view to_string(Phase phase);
std::string_view to_string(StopReason reason);

struct IterationRecord {
  int iter = 0;
  Phase phase = Phase::fast;
  FunctionalBreakdown value;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct SolveReport {
  std::vector<IterationRecord> iterations;
  DerivativeGrid z;
  Vec p;
  FunctionalBreakdown final_value;
  double final_grad_norm = 0.0;
  int outer_iters = 0;
  /// Nodes where some x_j is (numerically) zero, i.e. where the gradient
  /// formula uses the sign(0) = 0 branch.
  std::vector<int> kink_nodes;
  bool converged = false;
  StopReason reason = StopReason::max_iters;
};

struct LineSearchResult {
  double step = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool flagged = false;      ///< no acceptable step above the floor
  bool saw_nonfinite = false;
};

/// Value of the functional along the ray point + step * direction.
using RayFunctional = std::function<double(double step)>;

/// Backtracking from init_step until value(step) <= value0 + armijo * step * slope,
/// where slope is the directional derivative at step 0 (negative for a descent
/// direction). Non-finite trial values count as rejections.
LineSearchResult line_search(const RayFunctional& value, double value0, double slope, double init_step,
                             const DescentConfig& config);

/// Alternating steepest descent: one z-step with p frozen, then
/// config.slow_inner_iters p-steps with z frozen, repeated until a stopping
/// rule fires.
SolveReport solve(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z0, const Vec& p0,
                  const DescentConfig& config);

std::vector<int> find_kink_nodes(const StateGrid& x, double tol = 1e-12);

}  // namespace smtraj
