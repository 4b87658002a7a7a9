#pragma once

#include "smtraj/controls.hpp"
#include "smtraj/grid.hpp"
#include "smtraj/problem.hpp"

namespace smtraj {

/// Per-node integrands and their partials for the residual functional.
/// Row k of each matrix belongs to node k. Only phi/omega are filled when
/// the gradient is not requested.
struct NodeTerms {
  Vec phi;         ///< 0.5 * sum_i h_i^2 (relay) or 0.5 * sum_i r_i^2 (smooth controls)
  Vec omega;       ///< 0.5 * |s|^2 (relay only, zero otherwise)
  NodeMatrix dz;   ///< d(phi)/dz at the node
  NodeMatrix dx;   ///< d(phi + omega)/dx at the node
  NodeMatrix dp;   ///< d(phi + omega)/dp at the node
};

/// Node-parallel evaluation of the integrands. With Exec::parallel the node
/// loop runs under OpenMP; every node writes only its own rows, so the
/// result is bit-identical to Exec::serial.
NodeTerms evaluate_nodes(const ProblemSpec& spec, const StateGrid& x, const DerivativeGrid& z, const Vec& p,
                         bool with_gradient, Exec exec = Exec::parallel);

/// Sum_k w_k v[k] in node order.
double weighted_sum(const TimeGrid& grid, const Vec& v);

/// Column-wise sum_k w_k m[k] in node order.
Vec weighted_column_sums(const TimeGrid& grid, const NodeMatrix& m);

}  // namespace smtraj
