#include "smtraj/gradients.hpp"

#include <cmath>

#include "smtraj/kernels.hpp"

namespace smtraj {

double bundle_norm(const TimeGrid& grid, const NodeMatrix& g_z, const Vec& g_p) {
  const Vec sq = g_z.rowwise().squaredNorm();
  return std::sqrt(quadrature(grid, sq) + g_p.squaredNorm());
}

ValueAndGradient evaluate_with_gradient(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z,
                                        const Vec& p, Exec exec) {
  if (z.nodes() != grid.size() || z.dim() != spec.n) throw DimensionError("gradient: z shape disagrees with grid/problem");
  const StateGrid x = build_state(grid, z, spec.x0);
  const NodeTerms terms = evaluate_nodes(spec, x, z, p, true, exec);

  ValueAndGradient out;
  out.value.phi = weighted_sum(grid, terms.phi);
  out.value.omega = weighted_sum(grid, terms.omega);

  GradientBundle& g = out.gradient;
  g.g_z = terms.dz + discrete_tail(grid, terms.dx);
  const Vec resid = endpoint_residuals(spec, grid, z);
  for (std::size_t e = 0; e < spec.endpoint.size(); ++e) g.g_z.col(spec.endpoint[e].index).array() += resid[e];
  g.g_p = weighted_column_sums(grid, terms.dp);
  g.norm = bundle_norm(grid, g.g_z, g.g_p);

  out.value.chi = 0.5 * resid.squaredNorm();
  out.value.total = out.value.phi + out.value.chi + out.value.omega;
  return out;
}

GradientBundle grad_I(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                      Exec exec) {
  if (spec.uses_smooth_control()) throw std::invalid_argument("grad_I: problem uses a smooth control; use grad_I12");
  return evaluate_with_gradient(spec, grid, z, p, exec).gradient;
}

GradientBundle grad_I12(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                        Exec exec) {
  if (!spec.uses_smooth_control()) throw std::invalid_argument("grad_I12: control kind must be u1 or u2");
  return evaluate_with_gradient(spec, grid, z, p, exec).gradient;
}

namespace {

// Derivative at offset 0 of `at(offset)`; NaN/Inf clears `finite`.
template <class At>
double central_difference(const At& at, double step, FdStencil stencil, bool& finite) {
  const double up = at(step);
  const double down = at(-step);
  if (stencil == FdStencil::second_order) {
    if (!std::isfinite(up) || !std::isfinite(down)) finite = false;
    return (up - down) / (2.0 * step);
  }
  const double up2 = at(2.0 * step);
  const double down2 = at(-2.0 * step);
  if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(up2) || !std::isfinite(down2)) finite = false;
  return (8.0 * (up - down) - (up2 - down2)) / (12.0 * step);
}

}  // namespace

GradientBundle fd_gradient(const ScalarFunctional& f, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                           double step, Exec exec, FdStencil stencil) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  if (z.nodes() != grid.size()) throw DimensionError("fd_gradient: z node count differs from the grid");
  const int nodes = z.nodes();
  const int n = z.dim();
  const int slots = nodes * n;
  GradientBundle out;
  out.g_z.resize(nodes, n);
  out.g_p.resize(p.size());
  bool finite = true;

  const bool parallel = exec == Exec::parallel;
#pragma omp parallel if (parallel)
  {
    DerivativeGrid work = z;
    bool local_finite = true;
#pragma omp for schedule(static)
    for (int idx = 0; idx < slots; ++idx) {
      const int k = idx / n;
      const int i = idx % n;
      double& slot = work.values(k, i);
      const double saved = slot;
      auto at = [&](double offset) {
        slot = saved + offset;
        return f(work, p);
      };
      out.g_z(k, i) = central_difference(at, step, stencil, local_finite) / grid.weight(k);
      slot = saved;
    }
    if (!local_finite) {
#pragma omp atomic write
      finite = false;
    }
  }
  Vec work_p = p;
  for (int q = 0; q < p.size(); ++q) {
    const double saved = work_p[q];
    auto at = [&](double offset) {
      work_p[q] = saved + offset;
      return f(z, work_p);
    };
    out.g_p[q] = central_difference(at, step, stencil, finite);
    work_p[q] = saved;
  }
  if (!finite) throw NonFiniteError("fd_gradient: functional returned a non-finite value");
  out.norm = bundle_norm(grid, out.g_z, out.g_p);
  return out;
}

double relative_error(const Eigen::Ref<const Mat>& a, const Eigen::Ref<const Mat>& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("relative_error: shape mismatch");
  if (a.size() == 0) return 0.0;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace smtraj
