#pragma once

namespace smtraj {

/// Step schedule for the alternating steepest descent. Step sizes here are
/// descent steps, unrelated to the control gains.
struct DescentConfig {
  int max_outer_iters = 200;
  double tol_I = 1e-4;
  double tol_grad = 1e-6;
  double z_step_init = 1.0;
  double p_step_init = 0.1;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int slow_inner_iters = 3;
  /// Smallest trial step before a line search gives up.
  double step_floor = 1e-14;
  /// Seed the fast phase's trial step with the Barzilai-Borwein estimate
  /// <s,s>/<s,y> from the previous fast step (falls back to z_step_init).
  /// The direction is still the negative gradient and every step still
  /// passes the Armijo test. Slow phases always start from p_step_init.
  bool bb_trial_steps = true;
  /// Bounds on a BB trial step, relative to z_step_init.
  double bb_max_ratio = 1e4;
  double bb_min_ratio = 1e-8;
  /// Outer iterations that run the fast phase alone before parameter steps
  /// begin. Early parameter gradients are dominated by the large residual of
  /// an unconverged z and can push p far from the eventual solution.
  int slow_warmup_iters = 0;
  /// Upper bound on the largest component of a slow-phase trial move
  /// (0 disables the bound).
  double p_max_move = 0.0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

}  // namespace smtraj
