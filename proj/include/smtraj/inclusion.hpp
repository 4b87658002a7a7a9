#pragma once

#include <vector>

#include "smtraj/problem.hpp"

namespace smtraj {

/// Interval bounds of one superdifferential component.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate() const { return lower == upper; }
  bool contains(double v, double tol = 0.0) const { return v >= lower - tol && v <= upper + tol; }
};

/// Superdifferential of h_i at (x, z_i): the z_i-slot coefficient and one
/// interval per state coordinate.
struct SuperdiffInterval {
  double z_coeff = 0.0;
  std::vector<Interval> x_part;
};

/// Fixed element of S_1 used when l_i has no positive maximum.
inline constexpr double kPsiDefault = 1.0;

double l1_norm(const Vec& x);

// Channel i is 0-based throughout; the controlled channels are 0..m-1.

/// Support function of the admissible set F_i(x) evaluated at psi.
double support_value(const ProblemSpec& spec, int i, const Vec& x, double psi);

/// Distance from z_i to F_i(x); zero exactly when the inclusion holds.
double h_value(const ProblemSpec& spec, int i, const Vec& x, double z_i);

/// The maximizing psi in S_1 = {-1, +1}: sign(z_i - A_i x) when h_i > 0,
/// otherwise kPsiDefault.
double psi_star(const ProblemSpec& spec, int i, const Vec& x, double z_i);

/// Pointwise superdifferential of h_i for a controlled channel. Coordinates
/// with x_j = 0 contribute the full interval [-a_i|psi*|, a_i|psi*|].
SuperdiffInterval superdifferential_h(const ProblemSpec& spec, int i, const Vec& x, double z_i);

}  // namespace smtraj
