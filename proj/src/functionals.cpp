#include "smtraj/functionals.hpp"

#include "smtraj/kernels.hpp"

namespace smtraj {

namespace {

void check_inputs(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z) {
  if (z.nodes() != grid.size()) throw DimensionError("functional: z node count differs from the grid");
  if (z.dim() != spec.n) throw DimensionError("functional: z width differs from n");
}

FunctionalBreakdown breakdown(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                              Exec exec) {
  check_inputs(spec, grid, z);
  const StateGrid x = build_state(grid, z, spec.x0);
  const NodeTerms terms = evaluate_nodes(spec, x, z, p, false, exec);
  FunctionalBreakdown out;
  out.phi = weighted_sum(grid, terms.phi);
  out.omega = weighted_sum(grid, terms.omega);
  out.chi = eval_chi(spec, grid, z);
  out.total = out.phi + out.chi + out.omega;
  return out;
}

}  // namespace

Vec endpoint_residuals(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z) {
  check_inputs(spec, grid, z);
  Vec r(static_cast<Eigen::Index>(spec.endpoint.size()));
  for (std::size_t e = 0; e < spec.endpoint.size(); ++e) {
    const int j = spec.endpoint[e].index;
    r[e] = spec.x0[j] + quadrature(grid, z.values.col(j)) - spec.endpoint[e].value;
  }
  return r;
}

double eval_chi(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z) {
  return 0.5 * endpoint_residuals(spec, grid, z).squaredNorm();
}

double eval_phi(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, Exec exec) {
  check_inputs(spec, grid, z);
  const StateGrid x = build_state(grid, z, spec.x0);
  // phi does not depend on the surface for the relay problem; for the smooth
  // problems use eval_I12, which needs the parameters.
  if (spec.uses_smooth_control()) throw std::invalid_argument("eval_phi: smooth-control phi depends on p; use eval_I12");
  return weighted_sum(grid, evaluate_nodes(spec, x, z, Vec::Zero(spec.surface.param_dim()), false, exec).phi);
}

double eval_omega(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p, Exec exec) {
  if (spec.uses_smooth_control()) return 0.0;
  check_inputs(spec, grid, z);
  const StateGrid x = build_state(grid, z, spec.x0);
  return weighted_sum(grid, evaluate_nodes(spec, x, z, p, false, exec).omega);
}

FunctionalBreakdown eval_I(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                           Exec exec) {
  if (spec.uses_smooth_control()) throw std::invalid_argument("eval_I: problem uses a smooth control; use eval_I12");
  return breakdown(spec, grid, z, p, exec);
}

FunctionalBreakdown eval_I12(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                             Exec exec) {
  if (!spec.uses_smooth_control()) throw std::invalid_argument("eval_I12: control kind must be u1 or u2");
  return breakdown(spec, grid, z, p, exec);
}

FunctionalBreakdown evaluate(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                             Exec exec) {
  return breakdown(spec, grid, z, p, exec);
}

}  // namespace smtraj
