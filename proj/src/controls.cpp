#include "smtraj/controls.hpp"

#include <cmath>
#include <string>

#include "smtraj/inclusion.hpp"

namespace smtraj {

CubicCoeffs derive_cubic_coeffs(double k, double delta) {
  if (!(k > 0.0)) throw std::invalid_argument("derive_cubic_coeffs: k must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("derive_cubic_coeffs: delta must be positive");
  // e d^3 + f d = k sqrt(d),  3 e d^2 + f = k / (2 sqrt(d))
  const double root = std::sqrt(delta);
  return {-k / (4.0 * delta * delta * root), 5.0 * k / (4.0 * root)};
}

ShapeEval u1_shape(double s) {
  const double decay = std::exp(-std::abs(s));
  return {s * decay, (1.0 - std::abs(s)) * decay};
}

ShapeEval u2_shape(double s, double k, double delta, const CubicCoeffs& cubic) {
  if (s < -delta) {
    const double r = std::sqrt(-s);
    return {-k * r, k / (2.0 * r)};
  }
  if (s > delta) {
    const double r = std::sqrt(s);
    return {k * r, k / (2.0 * r)};
  }
  return {(cubic.e * s * s + cubic.f) * s, 3.0 * cubic.e * s * s + cubic.f};
}

namespace {

void check_controlled(const ProblemSpec& spec, int i, const Vec& x) {
  if (i < 0 || i >= spec.m)
    throw std::out_of_range("control channel " + std::to_string(i) + " outside 0.." + std::to_string(spec.m - 1));
  if (x.size() != spec.n) throw DimensionError("state length must equal n");
}

double gain(const ProblemSpec& spec, int i) { return spec.alpha.size() ? spec.alpha[i] : spec.gain_upper[i]; }

// u = -alpha |x|_1 g(s(x)).
ControlEval from_shape(double alpha, const Vec& x, ShapeEval shape, const Vec& ds_dx) {
  const double norm = l1_norm(x);
  ControlEval out;
  out.value = -alpha * norm * shape.g;
  out.d_ds = -alpha * norm * shape.dg;
  out.d_dx = -alpha * (shape.g * x.unaryExpr([](double v) { return sign(v); }) + norm * shape.dg * ds_dx);
  return out;
}

}  // namespace

double relay_control(const ProblemSpec& spec, int i, const Vec& x, double s_i) {
  check_controlled(spec, i, x);
  return -gain(spec, i) * l1_norm(x) * sign(s_i);
}

ControlEval u1_control(const ProblemSpec& spec, int i, const Vec& x, double s_i, const Vec& ds_dx) {
  check_controlled(spec, i, x);
  return from_shape(gain(spec, i), x, u1_shape(s_i), ds_dx);
}

ControlEval u2_control(const ProblemSpec& spec, const CubicCoeffs& cubic, int i, const Vec& x, double s_i,
                       const Vec& ds_dx) {
  check_controlled(spec, i, x);
  return from_shape(gain(spec, i), x, u2_shape(s_i, spec.u2_k, spec.u2_delta, cubic), ds_dx);
}

ControlEval smooth_control(const ProblemSpec& spec, const CubicCoeffs& cubic, int i, const Vec& x, double s_i,
                           const Vec& ds_dx) {
  switch (spec.control) {
    case ControlKind::u1: return u1_control(spec, i, x, s_i, ds_dx);
    case ControlKind::u2: return u2_control(spec, cubic, i, x, s_i, ds_dx);
    case ControlKind::relay: break;
  }
  throw std::invalid_argument("smooth_control: relay control has no smooth form");
}

}  // namespace smtraj
