#pragma once

#include "smtraj/grid.hpp"
#include "smtraj/problem.hpp"

namespace smtraj {

/// Parts of the residual functional. omega is zero for the smooth-control
/// problem, where the surface enters only through the control.
struct FunctionalBreakdown {
  double phi = 0.0;
  double chi = 0.0;
  double omega = 0.0;
  double total = 0.0;
};

double eval_phi(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, Exec exec = Exec::parallel);
double eval_chi(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z);
double eval_omega(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                  Exec exec = Exec::parallel);

/// Relay problem: phi + chi + omega.
FunctionalBreakdown eval_I(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                           Exec exec = Exec::parallel);

/// Smooth-control problem (u1/u2): phi^{[1],[2]} + chi. Throws
/// std::invalid_argument for a relay problem.
FunctionalBreakdown eval_I12(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                             Exec exec = Exec::parallel);

/// eval_I or eval_I12 depending on spec.control.
FunctionalBreakdown evaluate(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                             Exec exec = Exec::parallel);

/// Endpoint residuals x_j(T) - x_T_j, one per endpoint entry.
Vec endpoint_residuals(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z);

}  // namespace smtraj
