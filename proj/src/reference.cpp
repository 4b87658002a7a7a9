#include "smtraj/reference.hpp"

#include "smtraj/controls.hpp"
#include "smtraj/inclusion.hpp"

namespace smtraj::reference {

namespace {

struct Pointwise {
  double phi = 0.0;
  double omega = 0.0;
  Vec dz, dx, dp;
};

Pointwise pointwise(const ProblemSpec& spec, const CubicCoeffs& cubic, const Vec& x, const Vec& z, const Vec& p) {
  Pointwise out;
  out.dz = Vec::Zero(spec.n);
  out.dx = Vec::Zero(spec.n);
  out.dp = Vec::Zero(p.size());
  const Vec s = spec.surface.eval(x, p);
  const Mat ds_dx = spec.surface.jacobian_x(p);
  const Mat ds_dp = spec.surface.jacobian_p(x, p);

  if (!spec.uses_smooth_control()) {
    for (int i = 0; i < spec.n; ++i) {
      const double h = h_value(spec, i, x, z[i]);
      out.phi += 0.5 * h * h;
      if (h == 0.0) continue;
      const double psi = psi_star(spec, i, x, z[i]);
      out.dz[i] = h * psi;
      // gradient in x of the support function c(F_i(x), psi)
      Vec dsupport = psi * spec.A.row(i).transpose();
      if (spec.is_controlled(i))
        dsupport += spec.gain_upper[i] * std::abs(psi) * x.unaryExpr([](double v) { return sign(v); });
      out.dx -= h * dsupport;
    }
    out.omega = 0.5 * s.squaredNorm();
    out.dx += ds_dx.transpose() * s;
    out.dp += ds_dp.transpose() * s;
    return out;
  }

  for (int i = 0; i < spec.n; ++i) {
    double r = z[i] - spec.A.row(i).dot(x);
    Vec dr_dx = -spec.A.row(i).transpose();
    if (spec.is_controlled(i)) {
      const ControlEval u = smooth_control(spec, cubic, i, x, s[i], ds_dx.row(i).transpose());
      r -= u.value;
      dr_dx -= u.d_dx;
      out.dp -= r * u.d_ds * ds_dp.row(i).transpose();
    }
    out.phi += 0.5 * r * r;
    out.dz[i] = r;
    out.dx += r * dr_dx;
  }
  return out;
}

}  // namespace

FunctionalBreakdown evaluate(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p) {
  const StateGrid x = build_state(grid, z, spec.x0);
  const CubicCoeffs cubic = spec.control == ControlKind::u2 ? derive_cubic_coeffs(spec.u2_k, spec.u2_delta) : CubicCoeffs{};
  FunctionalBreakdown out;
  for (int k = 0; k < grid.size(); ++k) {
    const Pointwise pt = pointwise(spec, cubic, x.values.row(k).transpose(), z.values.row(k).transpose(), p);
    out.phi += grid.weight(k) * pt.phi;
    out.omega += grid.weight(k) * pt.omega;
  }
  for (const auto& e : spec.endpoint) {
    const double r = x.values(grid.size() - 1, e.index) - e.value;
    out.chi += 0.5 * r * r;
  }
  out.total = out.phi + out.chi + out.omega;
  return out;
}

GradientBundle gradient(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p) {
  const StateGrid x = build_state(grid, z, spec.x0);
  const CubicCoeffs cubic = spec.control == ControlKind::u2 ? derive_cubic_coeffs(spec.u2_k, spec.u2_delta) : CubicCoeffs{};
  const int nodes = grid.size();
  const int last = nodes - 1;
  const double dt = grid.step();

  std::vector<Pointwise> pts;
  pts.reserve(nodes);
  for (int k = 0; k < nodes; ++k)
    pts.push_back(pointwise(spec, cubic, x.values.row(k).transpose(), z.values.row(k).transpose(), p));

  // dx[k]/dz[j] = c(k, j) * identity.
  auto c = [&](int k, int j) {
    if (k == 0 || j > k) return 0.0;
    if (j == 0 || j == k) return 0.5 * dt;
    return dt;
  };

  GradientBundle out;
  out.g_z.resize(nodes, spec.n);
  out.g_p = Vec::Zero(p.size());
  for (int j = 0; j < nodes; ++j) {
    Vec g = grid.weight(j) * pts[j].dz;
    for (int k = j; k < nodes; ++k) g += grid.weight(k) * c(k, j) * pts[k].dx;
    for (const auto& e : spec.endpoint) g[e.index] += (x.values(last, e.index) - e.value) * c(last, j);
    out.g_z.row(j) = (g / grid.weight(j)).transpose();
  }
  for (int k = 0; k < nodes; ++k) out.g_p += grid.weight(k) * pts[k].dp;
  out.norm = bundle_norm(grid, out.g_z, out.g_p);
  return out;
}

}  // namespace smtraj::reference
