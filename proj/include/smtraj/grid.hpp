#pragma once

#include "smtraj/types.hpp"

namespace smtraj {

/// Uniform grid t_k = k T / (N-1) with trapezoid weights.
class TimeGrid {
 public:
  TimeGrid(int nodes, double horizon);

  int size() const { return nodes_; }
  double horizon() const { return horizon_; }
  double step() const { return step_; }
  double node(int k) const { return k == nodes_ - 1 ? horizon_ : k * step_; }
  double weight(int k) const { return (k == 0 || k == nodes_ - 1) ? 0.5 * step_ : step_; }
  const Vec& weights() const { return weights_; }

 private:
  int nodes_;
  double horizon_;
  double step_;
  Vec weights_;
};

/// Samples z[k][i] of the derivative trajectory; the descent variable.
struct DerivativeGrid {
  NodeMatrix values;

  static DerivativeGrid zeros(int nodes, int n) { return {NodeMatrix::Zero(nodes, n)}; }
  int nodes() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

/// States reconstructed from z, x[0] = x0.
struct StateGrid {
  NodeMatrix values;

  int nodes() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

/// x[k+1] = x[k] + dt (z[k] + z[k+1]) / 2.
StateGrid build_state(const TimeGrid& grid, const DerivativeGrid& z, const Vec& x0);

/// Trapezoid rule: sum_k w_k samples[k], compensated summation in node order.
double quadrature(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples);

/// head[k] = integral over [0, t_k] by the cumulative trapezoid.
Vec cumulative_trapezoid(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples);

/// tail[k] = integral over [t_k, T] by the reverse cumulative trapezoid.
Vec reverse_cumulative_trapezoid(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples);

/// Transpose of the state map for one node-sampled field g (N x n):
/// out[j] = (1/w_j) sum_k w_k g[k] dx[k]/dz[j]. This is the discrete
/// counterpart of the tail integral int_{t_j}^T g dt; it equals the reverse
/// cumulative trapezoid at interior nodes, and differs from it by O(dt) at
/// the two end nodes.
NodeMatrix discrete_tail(const TimeGrid& grid, const NodeMatrix& g);

}  // namespace smtraj
