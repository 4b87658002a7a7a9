#include "smtraj/grid.hpp"

#include <cmath>
#include <string>

namespace smtraj {

TimeGrid::TimeGrid(int nodes, double horizon) : nodes_(nodes), horizon_(horizon) {
  if (nodes < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
  if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  step_ = horizon / (nodes - 1);
  weights_.resize(nodes);
  for (int k = 0; k < nodes; ++k) weights_[k] = weight(k);
}

StateGrid build_state(const TimeGrid& grid, const DerivativeGrid& z, const Vec& x0) {
  if (z.nodes() != grid.size()) throw DimensionError("build_state: z has " + std::to_string(z.nodes()) + " nodes, grid has " + std::to_string(grid.size()));
  if (z.dim() != x0.size()) throw DimensionError("build_state: z width differs from x0 length");
  StateGrid x{NodeMatrix(z.nodes(), z.dim())};
  x.values.row(0) = x0.transpose();
  const double half = 0.5 * grid.step();
  for (int k = 0; k + 1 < grid.size(); ++k)
    x.values.row(k + 1) = x.values.row(k) + half * (z.values.row(k) + z.values.row(k + 1));
  return x;
}

double quadrature(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples) {
  if (samples.size() != grid.size()) throw DimensionError("quadrature: sample count differs from node count");
  // Neumaier-compensated, node order.
  double sum = 0.0;
  double carry = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double term = grid.weight(k) * samples[k];
    const double next = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
  }
  return sum + carry;
}

Vec cumulative_trapezoid(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples) {
  if (samples.size() != grid.size()) throw DimensionError("cumulative_trapezoid: length mismatch");
  Vec head(grid.size());
  head[0] = 0.0;
  for (int k = 0; k + 1 < grid.size(); ++k) head[k + 1] = head[k] + 0.5 * grid.step() * (samples[k] + samples[k + 1]);
  return head;
}

Vec reverse_cumulative_trapezoid(const TimeGrid& grid, const Eigen::Ref<const Vec>& samples) {
  if (samples.size() != grid.size()) throw DimensionError("reverse_cumulative_trapezoid: length mismatch");
  const int n = grid.size();
  Vec tail(n);
  tail[n - 1] = 0.0;
  for (int k = n - 2; k >= 0; --k) tail[k] = tail[k + 1] + 0.5 * grid.step() * (samples[k] + samples[k + 1]);
  return tail;
}

NodeMatrix discrete_tail(const TimeGrid& grid, const NodeMatrix& g) {
  if (g.rows() != grid.size()) throw DimensionError("discrete_tail: row count differs from node count");
  const int last = grid.size() - 1;
  NodeMatrix out(g.rows(), g.cols());
  // dx[k]/dz[j] = c_kj I with c_kj = w_j for k > j (except c_k0 = dt/2) and
  // c_jj = dt/2 for j >= 1; dividing by w_j gives the factors below.
  Eigen::RowVectorXd suffix = Eigen::RowVectorXd::Zero(g.cols());
  out.row(last) = grid.weight(last) * g.row(last);
  for (int j = last - 1; j >= 0; --j) {
    suffix += grid.weight(j + 1) * g.row(j + 1);
    out.row(j) = suffix;
    if (j > 0) out.row(j) += 0.5 * grid.weight(j) * g.row(j);
  }
  return out;
}

}  // namespace smtraj
