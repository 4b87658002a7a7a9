#pragma once

#include "smtraj/problem.hpp"

namespace smtraj {

/// Coefficients of the inner cubic branch e s^3 + f s of the u2 control,
/// fixed by C^1 matching against k sqrt(s) at s = delta.
struct CubicCoeffs {
  double e = 0.0;
  double f = 0.0;
};

/// Throws std::invalid_argument unless k > 0 and delta > 0.
CubicCoeffs derive_cubic_coeffs(double k, double delta);

/// Value of a control law and its partials. d_dx already includes the
/// surface dependence through ds/dx; d_ds is the scalar slope in s.
struct ControlEval {
  double value = 0.0;
  double d_ds = 0.0;
  Vec d_dx;
};

/// Shape g(s) of a smooth control u = -alpha |x|_1 g(s), with g'(s).
struct ShapeEval {
  double g = 0.0;
  double dg = 0.0;
};

ShapeEval u1_shape(double s);
ShapeEval u2_shape(double s, double k, double delta, const CubicCoeffs& cubic);

/// -alpha_i |x|_1 sign(s_i), sign(0) = 0.
double relay_control(const ProblemSpec& spec, int i, const Vec& x, double s_i);

/// -alpha_i |x|_1 s_i exp(-|s_i|). ds_dx is row i of the surface Jacobian.
ControlEval u1_control(const ProblemSpec& spec, int i, const Vec& x, double s_i, const Vec& ds_dx);

/// Piecewise square-root/cubic control; the cubic branch covers |s| <= delta.
ControlEval u2_control(const ProblemSpec& spec, const CubicCoeffs& cubic, int i, const Vec& x, double s_i,
                       const Vec& ds_dx);

/// Dispatches on spec.control (u1 or u2).
ControlEval smooth_control(const ProblemSpec& spec, const CubicCoeffs& cubic, int i, const Vec& x, double s_i,
                           const Vec& ds_dx);

}  // namespace smtraj
