#pragma once

#include <functional>

#include "smtraj/functionals.hpp"

namespace smtraj {

/// L2 x R^d gradient of the discretized functional. g_z[k] is the partial
/// derivative with respect to z[k] divided by the trapezoid weight w_k, so
/// it samples the continuous Gateaux gradient.
struct GradientBundle {
  NodeMatrix g_z;
  Vec g_p;
  double norm = 0.0;
};

/// sqrt(quadrature(|g_z|^2) + |g_p|^2).
double bundle_norm(const TimeGrid& grid, const NodeMatrix& g_z, const Vec& g_p);

/// Relay problem gradient.
GradientBundle grad_I(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                      Exec exec = Exec::parallel);

/// Smooth-control (u1/u2) problem gradient.
GradientBundle grad_I12(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                        Exec exec = Exec::parallel);

/// Value and gradient in one pass; dispatches on spec.control.
struct ValueAndGradient {
  FunctionalBreakdown value;
  GradientBundle gradient;
};
ValueAndGradient evaluate_with_gradient(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z,
                                        const Vec& p, Exec exec = Exec::parallel);

using ScalarFunctional = std::function<double(const DerivativeGrid& z, const Vec& p)>;

enum class FdStencil {
  second_order,  ///< (f(+h) - f(-h)) / 2h
  fourth_order,  ///< (8 (f(+h) - f(-h)) - (f(+2h) - f(-2h))) / 12h
};

/// Central differences of `f` in every z[k][i] (divided by w_k) and every
/// parameter. Throws NonFiniteError if any evaluation is NaN/Inf.
GradientBundle fd_gradient(const ScalarFunctional& f, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                           double step, Exec exec = Exec::parallel, FdStencil stencil = FdStencil::fourth_order);

/// Relative discrepancy max|a - b| / max(max|b|, floor) over one block.
double relative_error(const Eigen::Ref<const Mat>& a, const Eigen::Ref<const Mat>& b, double floor = 1e-12);

}  // namespace smtraj
