#include "smtraj/inclusion.hpp"

#include <cmath>
#include <string>

namespace smtraj {

namespace {

void check_channel(const ProblemSpec& spec, int i, const Vec& x) {
  if (i < 0 || i >= spec.n)
    throw std::out_of_range("channel index " + std::to_string(i) + " outside 0.." + std::to_string(spec.n - 1));
  if (x.size() != spec.n) throw DimensionError("state length must equal n");
}

}  // namespace

double l1_norm(const Vec& x) { return x.lpNorm<1>(); }

double support_value(const ProblemSpec& spec, int i, const Vec& x, double psi) {
  check_channel(spec, i, x);
  const double drift = psi * spec.A.row(i).dot(x);
  if (!spec.is_controlled(i)) return drift;
  return drift + spec.gain_upper[i] * l1_norm(x) * std::abs(psi);
}

double h_value(const ProblemSpec& spec, int i, const Vec& x, double z_i) {
  check_channel(spec, i, x);
  const double drift = spec.A.row(i).dot(x);
  if (!spec.is_controlled(i)) return std::abs(z_i - drift);
  // max(0, |z - A_i x| - a|x|_1), with each branch rounded the same way as
  // z psi - support_value(psi) for psi = +1 and psi = -1.
  const double radius = spec.gain_upper[i] * l1_norm(x);
  return std::max(0.0, std::max(z_i - (drift + radius), (drift - radius) - z_i));
}

double psi_star(const ProblemSpec& spec, int i, const Vec& x, double z_i) {
  if (h_value(spec, i, x, z_i) > 0.0) return sign(z_i - spec.A.row(i).dot(x));
  return kPsiDefault;
}

SuperdiffInterval superdifferential_h(const ProblemSpec& spec, int i, const Vec& x, double z_i) {
  check_channel(spec, i, x);
  const double psi = psi_star(spec, i, x, z_i);
  SuperdiffInterval out;
  out.z_coeff = psi;
  out.x_part.resize(spec.n);
  const double gain = spec.is_controlled(i) ? spec.gain_upper[i] * std::abs(psi) : 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const double smooth = -psi * spec.A(i, j);
    if (x[j] != 0.0 || gain == 0.0) {
      const double v = smooth - gain * sign(x[j]);
      out.x_part[j] = {v, v};
    } else {
      out.x_part[j] = {smooth - gain, smooth + gain};
    }
  }
  return out;
}

}  // namespace smtraj
