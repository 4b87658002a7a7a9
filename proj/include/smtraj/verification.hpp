#pragma once

#include <string>
#include <vector>

#include "smtraj/integrators.hpp"
#include "smtraj/problem.hpp"

namespace smtraj {

/// The surface cannot be solved for the controlled coordinates.
class SurfaceReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyReport {
  std::vector<int> endpoint_indices;  ///< 0-based
  Vec endpoint_values;                ///< x_j(T) of the closed loop
  Vec endpoint_errors;                ///< |x_j(T) - x_T_j|
  double max_inclusion_residual = 0.0;
  double max_surface_residual = 0.0;
  std::string integrator;
  double integrator_parameter = 0.0;  ///< rtol for rk45, step for rk4
  bool reduced = false;               ///< relay problem integrated on the surface
  StateGrid trajectory;
};

/// Closed-loop trajectory for the recovered parameters, sampled on `grid`.
/// Relay problems are reduced onto s(x, p) = 0 by solving for x_1..x_m
/// (throws SurfaceReductionError if the leading m x m block is singular);
/// smooth-control problems integrate x' = A x + u(x, p) directly.
StateGrid integrate_closed_loop(const ProblemSpec& spec, const TimeGrid& grid, const Vec& p,
                                const IntegratorSettings& settings = {});

/// Forward differences, last node copied from its left neighbour.
NodeMatrix forward_difference_derivative(const TimeGrid& grid, const StateGrid& x);

/// Residual scan of a trajectory: max over nodes of sum_i h_i (relay) or
/// sum_i |z_i - A_i x - u_i| (smooth controls), max |s(x, p)|_inf, and endpoint errors.
VerifyReport inclusion_residual(const ProblemSpec& spec, const TimeGrid& grid, const StateGrid& x, const Vec& p);

/// integrate_closed_loop followed by inclusion_residual.
VerifyReport verify(const ProblemSpec& spec, const TimeGrid& grid, const Vec& p, const IntegratorSettings& settings = {});

/// max over nodes and the endpoint-constrained coordinates of |a - b|.
double trajectory_gap(const ProblemSpec& spec, const StateGrid& a, const StateGrid& b);

}  // namespace smtraj
