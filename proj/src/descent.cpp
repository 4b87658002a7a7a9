#include "smtraj/descent.hpp"

#include <algorithm>
#include <cmath>

namespace smtraj {

std::string_view to_string(Phase phase) { return phase == Phase::fast ? "fast" : "slow"; }

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tol_I: return "tol_I";
    case StopReason::tol_grad: return "tol_grad";
    case StopReason::max_iters: return "max_iters";
    case StopReason::stalled: return "stalled";
    case StopReason::nonfinite: return "nonfinite";
  }
  return "?";
}

LineSearchResult line_search(const RayFunctional& value, double value0, double slope, double init_step,
                             const DescentConfig& config) {
  LineSearchResult out;
  out.value = value0;
  if (!(slope < 0.0)) {
    out.flagged = true;
    return out;
  }
  for (double step = init_step; step >= config.step_floor; step *= config.backtrack) {
    const double trial = value(step);
    ++out.evaluations;
    if (!std::isfinite(trial)) {
      out.saw_nonfinite = true;
      continue;
    }
    if (trial <= value0 + config.armijo * step * slope) {
      out.step = step;
      out.value = trial;
      return out;
    }
  }
  out.flagged = true;
  return out;
}

std::vector<int> find_kink_nodes(const StateGrid& x, double tol) {
  std::vector<int> nodes;
  for (int k = 0; k < x.nodes(); ++k)
    if ((x.values.row(k).array().abs() <= tol).any()) nodes.push_back(k);
  return nodes;
}

SolveReport solve(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z0, const Vec& p0,
                  const DescentConfig& config) {
  config.validate();
  if (z0.nodes() != grid.size() || z0.dim() != spec.n) throw DimensionError("solve: initial z shape mismatch");
  if (p0.size() != spec.surface.param_dim()) throw DimensionError("solve: initial parameter length mismatch");

  SolveReport report;
  report.z = z0;
  report.p = p0;
  DerivativeGrid& z = report.z;
  Vec& p = report.p;

  auto total_at = [&](const DerivativeGrid& zz, const Vec& pp) { return evaluate(spec, grid, zz, pp).total; };
  auto l2_dot = [&](const NodeMatrix& a, const NodeMatrix& b) {
    return quadrature(grid, a.cwiseProduct(b).rowwise().sum());
  };
  // <s,s>/<s,y> from the previous fast step, clamped around init.
  auto trial_step = [&](double init, double ss, double sy) {
    if (!config.bb_trial_steps || !(sy > 0.0) || !(ss > 0.0)) return init;
    return std::clamp(ss / sy, init * config.bb_min_ratio, init * config.bb_max_ratio);
  };

  struct {
    bool valid = false;
    NodeMatrix z, g;
  } fast_mem;

  int outer = 0;
  for (;; ++outer) {
    ValueAndGradient vg = evaluate_with_gradient(spec, grid, z, p);
    report.final_value = vg.value;
    report.final_grad_norm = vg.gradient.norm;
    if (!std::isfinite(vg.value.total) || !std::isfinite(vg.gradient.norm)) {
      report.reason = StopReason::nonfinite;
      break;
    }
    if (vg.value.total <= config.tol_I) {
      report.reason = StopReason::tol_I;
      break;
    }
    if (vg.gradient.norm <= config.tol_grad) {
      report.reason = StopReason::tol_grad;
      break;
    }
    if (outer >= config.max_outer_iters) {
      report.reason = StopReason::max_iters;
      break;
    }

    bool moved = false;

    // Fast phase: z only.
    {
      const NodeMatrix& g = vg.gradient.g_z;
      const double slope = -l2_dot(g, g);
      double init = config.z_step_init;
      if (fast_mem.valid) {
        const NodeMatrix ds = z.values - fast_mem.z;
        const NodeMatrix dy = g - fast_mem.g;
        init = trial_step(config.z_step_init, l2_dot(ds, ds), l2_dot(ds, dy));
      }
      fast_mem = {true, z.values, g};
      DerivativeGrid trial = z;
      auto ray = [&](double step) {
        trial.values = z.values - step * g;
        return total_at(trial, p);
      };
      const LineSearchResult ls = line_search(ray, vg.value.total, slope, init, config);
      if (ls.step > 0.0) {
        z.values -= ls.step * g;
        moved = true;
      }
      const FunctionalBreakdown now = ls.step > 0.0 ? evaluate(spec, grid, z, p) : vg.value;
      report.iterations.push_back({outer, Phase::fast, now, vg.gradient.norm, ls.step});
    }

    // Slow phases: p only.
    const bool slow_active = p.size() > 0 && outer >= config.slow_warmup_iters;
    for (int inner = 0; slow_active && inner < config.slow_inner_iters; ++inner) {
      const ValueAndGradient sg = evaluate_with_gradient(spec, grid, z, p);
      const Vec g = sg.gradient.g_p;
      const double slope = -g.squaredNorm();
      double init = config.p_step_init;
      const double largest = g.cwiseAbs().maxCoeff();
      if (config.p_max_move > 0.0 && init * largest > config.p_max_move) init = config.p_max_move / largest;
      auto ray = [&](double step) { return total_at(z, p - step * g); };
      const LineSearchResult ls = line_search(ray, sg.value.total, slope, init, config);
      if (ls.step > 0.0) {
        p -= ls.step * g;
        moved = true;
      }
      const FunctionalBreakdown now = ls.step > 0.0 ? evaluate(spec, grid, z, p) : sg.value;
      report.iterations.push_back({outer, Phase::slow, now, sg.gradient.norm, ls.step});
    }

    if (!moved) {
      const ValueAndGradient last = evaluate_with_gradient(spec, grid, z, p);
      report.final_value = last.value;
      report.final_grad_norm = last.gradient.norm;
      report.reason = StopReason::stalled;
      ++outer;
      break;
    }
  }

  report.outer_iters = outer;
  report.converged = report.reason == StopReason::tol_I || report.reason == StopReason::tol_grad;
  report.kink_nodes = find_kink_nodes(build_state(grid, z, spec.x0));
  return report;
}

}  // namespace smtraj
