#include "smtraj/verification.hpp"

#include <cmath>

#include "smtraj/controls.hpp"
#include "smtraj/inclusion.hpp"

namespace smtraj {

namespace {

struct Reduction {
  Eigen::PartialPivLU<Mat> lead;  // W(:, 0..m-1)
  Mat rest;                       // W(:, m..n-1)
  Vec offsets;

  Vec controlled(const Vec& x_rest) const { return lead.solve(offsets - rest * x_rest); }
};

Reduction make_reduction(const ProblemSpec& spec, const Vec& p) {
  const Mat w = spec.surface.jacobian_x(p);
  const Mat lead = w.leftCols(spec.m);
  Eigen::FullPivLU<Mat> check(lead);
  const double scale = std::max(1.0, lead.cwiseAbs().maxCoeff());
  check.setThreshold(1e-12);
  if (check.rank() < spec.m || std::abs(check.determinant()) <= 1e-12 * std::pow(scale, spec.m))
    throw SurfaceReductionError("surface cannot be solved for x_1..x_m: leading coefficient block is singular");
  Reduction r{Eigen::PartialPivLU<Mat>(lead), w.rightCols(spec.n - spec.m), Vec(spec.m)};
  for (int i = 0; i < spec.m; ++i) r.offsets[i] = spec.surface.offsets()[i].resolve(p);
  return r;
}

}  // namespace

StateGrid integrate_closed_loop(const ProblemSpec& spec, const TimeGrid& grid, const Vec& p,
                                const IntegratorSettings& settings) {
  if (p.size() != spec.surface.param_dim()) throw DimensionError("integrate_closed_loop: parameter length mismatch");
  const int n = spec.n;
  const int m = spec.m;

  if (!spec.uses_smooth_control()) {
    const Reduction red = make_reduction(spec, p);
    const int free_dim = n - m;
    StateGrid out{NodeMatrix(grid.size(), n)};
    if (free_dim == 0) {
      const Vec xc = red.controlled(Vec(0));
      for (int k = 0; k < grid.size(); ++k) out.values.row(k) = xc.transpose();
      return out;
    }
    auto full = [&](const Vec& x_rest) {
      Vec x(n);
      x.head(m) = red.controlled(x_rest);
      x.tail(free_dim) = x_rest;
      return x;
    };
    const OdeRhs rhs = [&](double, const Vec& x_rest, Vec& dx) {
      dx = spec.A.bottomRows(free_dim) * full(x_rest);
    };
    const NodeMatrix rest = integrate_on_grid(rhs, spec.x0.tail(free_dim), grid, settings);
    for (int k = 0; k < grid.size(); ++k) out.values.row(k) = full(rest.row(k).transpose()).transpose();
    return out;
  }

  const CubicCoeffs cubic = spec.control == ControlKind::u2 ? derive_cubic_coeffs(spec.u2_k, spec.u2_delta) : CubicCoeffs{};
  const Mat ds_dx = spec.surface.jacobian_x(p);
  const OdeRhs rhs = [&](double, const Vec& x, Vec& dx) {
    dx = spec.A * x;
    const Vec s = spec.surface.eval(x, p);
    for (int i = 0; i < m; ++i) dx[i] += smooth_control(spec, cubic, i, x, s[i], ds_dx.row(i).transpose()).value;
  };
  return {integrate_on_grid(rhs, spec.x0, grid, settings)};
}

NodeMatrix forward_difference_derivative(const TimeGrid& grid, const StateGrid& x) {
  const int nodes = x.nodes();
  NodeMatrix z(nodes, x.dim());
  for (int k = 0; k + 1 < nodes; ++k) z.row(k) = (x.values.row(k + 1) - x.values.row(k)) / grid.step();
  z.row(nodes - 1) = z.row(nodes - 2);
  return z;
}

VerifyReport inclusion_residual(const ProblemSpec& spec, const TimeGrid& grid, const StateGrid& x, const Vec& p) {
  if (x.nodes() != grid.size() || x.dim() != spec.n) throw DimensionError("inclusion_residual: trajectory shape mismatch");
  const NodeMatrix z = forward_difference_derivative(grid, x);
  const CubicCoeffs cubic = spec.control == ControlKind::u2 ? derive_cubic_coeffs(spec.u2_k, spec.u2_delta) : CubicCoeffs{};
  const Mat ds_dx = spec.surface.jacobian_x(p);

  VerifyReport rep;
  for (int k = 0; k < grid.size(); ++k) {
    const Vec xk = x.values.row(k).transpose();
    const Vec s = spec.surface.eval(xk, p);
    double total = 0.0;
    for (int i = 0; i < spec.n; ++i) {
      if (spec.uses_smooth_control() && spec.is_controlled(i)) {
        const double u = smooth_control(spec, cubic, i, xk, s[i], ds_dx.row(i).transpose()).value;
        total += std::abs(z(k, i) - spec.A.row(i).dot(xk) - u);
      } else {
        total += h_value(spec, i, xk, z(k, i));
      }
    }
    rep.max_inclusion_residual = std::max(rep.max_inclusion_residual, total);
    rep.max_surface_residual = std::max(rep.max_surface_residual, s.cwiseAbs().maxCoeff());
  }

  const int last = grid.size() - 1;
  rep.endpoint_values.resize(static_cast<Eigen::Index>(spec.endpoint.size()));
  rep.endpoint_errors.resize(static_cast<Eigen::Index>(spec.endpoint.size()));
  for (std::size_t e = 0; e < spec.endpoint.size(); ++e) {
    const int j = spec.endpoint[e].index;
    rep.endpoint_indices.push_back(j);
    rep.endpoint_values[e] = x.values(last, j);
    rep.endpoint_errors[e] = std::abs(x.values(last, j) - spec.endpoint[e].value);
  }
  rep.trajectory = x;
  return rep;
}

VerifyReport verify(const ProblemSpec& spec, const TimeGrid& grid, const Vec& p, const IntegratorSettings& settings) {
  VerifyReport rep = inclusion_residual(spec, grid, integrate_closed_loop(spec, grid, p, settings), p);
  rep.reduced = !spec.uses_smooth_control();
  if (settings.method == Integrator::rk45) {
    rep.integrator = "rk45";
    rep.integrator_parameter = settings.rk45.rtol;
  } else {
    rep.integrator = "rk4";
    rep.integrator_parameter = settings.rk4_step > 0.0 ? settings.rk4_step : 1e-4 * grid.horizon();
  }
  return rep;
}

double trajectory_gap(const ProblemSpec& spec, const StateGrid& a, const StateGrid& b) {
  if (a.nodes() != b.nodes() || a.dim() != b.dim()) throw DimensionError("trajectory_gap: shape mismatch");
  double gap = 0.0;
  for (const auto& e : spec.endpoint)
    gap = std::max(gap, (a.values.col(e.index) - b.values.col(e.index)).cwiseAbs().maxCoeff());
  return gap;
}

}  // namespace smtraj
