#include "smtraj/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "smtraj/inclusion.hpp"

namespace smtraj {

namespace {

class NodeKernel {
 public:
  NodeKernel(const ProblemSpec& spec, const Vec& p, NodeTerms& out, bool with_gradient)
      : spec_(spec),
        out_(out),
        grad_(with_gradient),
        weights_(spec.surface.jacobian_x(p)),
        offsets_(spec.m) {
    for (int i = 0; i < spec.m; ++i) offsets_[i] = spec.surface.offsets()[i].resolve(p);
    if (spec.control == ControlKind::u2) cubic_ = derive_cubic_coeffs(spec.u2_k, spec.u2_delta);
  }

  void operator()(int k, const double* x, const double* z) const {
    const int n = spec_.n;
    const int m = spec_.m;
    double norm = 0.0;
    for (int j = 0; j < n; ++j) norm += std::abs(x[j]);

    double* dz = grad_ ? out_.dz.row(k).data() : nullptr;
    double* dx = grad_ ? out_.dx.row(k).data() : nullptr;
    double* dp = grad_ ? out_.dp.row(k).data() : nullptr;
    if (grad_) {
      std::fill(dz, dz + n, 0.0);
      std::fill(dx, dx + n, 0.0);
      std::fill(dp, dp + out_.dp.cols(), 0.0);
    }

    double phi = 0.0;
    double omega = 0.0;
    const bool relay = spec_.control == ControlKind::relay;
    for (int i = 0; i < n; ++i) {
      double drift = 0.0;
      for (int j = 0; j < n; ++j) drift += spec_.A(i, j) * x[j];
      const double gap = z[i] - drift;
      const bool controlled = i < m;

      if (relay || !controlled) {
        const double a = (relay && controlled) ? spec_.gain_upper[i] : 0.0;
        const double h = controlled ? std::max(0.0, std::abs(gap) - a * norm) : std::abs(gap);
        phi += 0.5 * h * h;
        if (grad_ && h > 0.0) {
          const double psi = sign(gap);
          dz[i] += h * psi;
          for (int j = 0; j < n; ++j) dx[j] -= h * (psi * spec_.A(i, j) + a * sign(x[j]) * std::abs(psi));
        }
        continue;
      }

      // Smooth control u = -alpha |x|_1 g(s).
      double s = -offsets_[i];
      for (int j = 0; j < n; ++j) s += weights_(i, j) * x[j];
      const ShapeEval shape = spec_.control == ControlKind::u1
                                  ? u1_shape(s)
                                  : u2_shape(s, spec_.u2_k, spec_.u2_delta, cubic_);
      const double alpha = spec_.alpha[i];
      const double u = -alpha * norm * shape.g;
      const double r = gap - u;
      phi += 0.5 * r * r;
      if (grad_) {
        dz[i] += r;
        const double du_ds = -alpha * norm * shape.dg;
        for (int j = 0; j < n; ++j) {
          const double du_dx = -alpha * shape.g * sign(x[j]) + du_ds * weights_(i, j);
          dx[j] -= r * (spec_.A(i, j) + du_dx);
        }
        accumulate_dp(i, x, -r * du_ds, dp);
      }
    }

    if (relay) {
      for (int i = 0; i < m; ++i) {
        double s = -offsets_[i];
        for (int j = 0; j < n; ++j) s += weights_(i, j) * x[j];
        omega += 0.5 * s * s;
        if (grad_) {
          for (int j = 0; j < n; ++j) dx[j] += s * weights_(i, j);
          accumulate_dp(i, x, s, dp);
        }
      }
    }
    out_.phi[k] = phi;
    out_.omega[k] = omega;
  }

 private:
  // dp += scale * ds_i/dp
  void accumulate_dp(int i, const double* x, double scale, double* dp) const {
    const auto& row = spec_.surface.coeffs()[i];
    for (int j = 0; j < spec_.n; ++j)
      if (row[j].is_free()) dp[row[j].param] += scale * x[j];
    const auto& off = spec_.surface.offsets()[i];
    if (off.is_free()) dp[off.param] -= scale;
  }

  const ProblemSpec& spec_;
  NodeTerms& out_;
  bool grad_;
  Mat weights_;
  Vec offsets_;
  CubicCoeffs cubic_;
};

}  // namespace

NodeTerms evaluate_nodes(const ProblemSpec& spec, const StateGrid& x, const DerivativeGrid& z, const Vec& p,
                         bool with_gradient, Exec exec) {
  if (x.nodes() != z.nodes() || x.dim() != spec.n || z.dim() != spec.n)
    throw DimensionError("evaluate_nodes: state/derivative grids disagree with the problem dimension");
  if (p.size() != spec.surface.param_dim()) throw DimensionError("evaluate_nodes: parameter length mismatch");

  const int nodes = z.nodes();
  NodeTerms out;
  out.phi.resize(nodes);
  out.omega.resize(nodes);
  if (with_gradient) {
    out.dz.resize(nodes, spec.n);
    out.dx.resize(nodes, spec.n);
    out.dp.resize(nodes, p.size());
  }
  const NodeKernel kernel(spec, p, out, with_gradient);
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < nodes; ++k) kernel(k, x.values.row(k).data(), z.values.row(k).data());
  return out;
}

double weighted_sum(const TimeGrid& grid, const Vec& v) { return quadrature(grid, v); }

Vec weighted_column_sums(const TimeGrid& grid, const NodeMatrix& m) {
  if (m.rows() != grid.size()) throw DimensionError("weighted_column_sums: row count mismatch");
  Vec acc = Vec::Zero(m.cols());
  for (int k = 0; k < grid.size(); ++k) acc += grid.weight(k) * m.row(k).transpose();
  return acc;
}

}  // namespace smtraj
