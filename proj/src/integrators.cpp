#include "smtraj/integrators.hpp"

#include <algorithm>
#include <cmath>

namespace smtraj {

Vec integrate_rk4(const OdeRhs& rhs, const Vec& x0, double t0, double t1, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate_rk4: step must be positive");
  const double span = t1 - t0;
  if (span == 0.0) return x0;
  const long count = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / step - 1e-9)));
  const double h = span / static_cast<double>(count);
  Vec x = x0;
  Vec k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
  for (long s = 0; s < count; ++s) {
    const double t = t0 + s * h;
    rhs(t, x, k1);
    rhs(t + 0.5 * h, x + 0.5 * h * k1, k2);
    rhs(t + 0.5 * h, x + 0.5 * h * k2, k3);
    rhs(t + h, x + h * k3, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!x.allFinite()) throw NonFiniteError("integrate_rk4: solution became non-finite");
  return x;
}

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

}  // namespace

Vec integrate_rk45(const OdeRhs& rhs, const Vec& x0, double t0, double t1, const Rk45Options& options,
                   IntegrationStats* stats) {
  const double span = t1 - t0;
  if (span == 0.0) return x0;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double min_step = options.min_step_fraction * std::abs(span);
  const int n = static_cast<int>(x0.size());

  Vec x = x0;
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), err(n);
  double t = t0;
  rhs(t, x, k1);

  double h = options.initial_step > 0.0 ? options.initial_step : 0.0;
  if (h == 0.0) {
    const double d0 = x.cwiseAbs().maxCoeff() + 1e-6;
    const double d1 = k1.cwiseAbs().maxCoeff() + 1e-6;
    h = std::min(std::abs(span), 0.01 * d0 / d1);
  }
  h = std::min(h, std::abs(span));

  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > options.max_steps) throw StiffnessError("integrate_rk45: step budget exhausted");
    const bool last = h >= std::abs(t1 - t);
    const double hs = last ? (t1 - t) : dir * h;

    rhs(t + c2 * hs, x + hs * a21 * k1, k2);
    rhs(t + c3 * hs, x + hs * (a31 * k1 + a32 * k2), k3);
    rhs(t + c4 * hs, x + hs * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    rhs(t + c5 * hs, x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    rhs(t + hs, x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    y = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hs, y, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      const double scale = options.atol + options.rtol * std::max(std::abs(x[i]), std::abs(y[i]));
      ratio = std::max(ratio, std::abs(err[i]) / scale);
    }
    if (!std::isfinite(ratio)) ratio = 1e10;

    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    if (ratio <= 1.0) {
      t = last ? t1 : t + hs;
      x = y;
      k1 = k7;
      if (stats) {
        ++stats->accepted;
        stats->last_step = std::abs(hs);
      }
      if (!last) h = std::abs(hs) * factor;
    } else {
      if (stats) ++stats->rejected;
      h = std::abs(hs) * std::min(1.0, factor);
      if (h < min_step) throw StiffnessError("integrate_rk45: step size underflow (stiff or singular system)");
    }
  }
  if (!x.allFinite()) throw NonFiniteError("integrate_rk45: solution became non-finite");
  if (stats) stats->suggested_step = h;
  return x;
}

NodeMatrix integrate_on_grid(const OdeRhs& rhs, const Vec& x0, const TimeGrid& grid,
                             const IntegratorSettings& settings, IntegrationStats* stats) {
  NodeMatrix out(grid.size(), x0.size());
  out.row(0) = x0.transpose();
  Vec x = x0;
  Rk45Options opts = settings.rk45;
  const double rk4_step = settings.rk4_step > 0.0 ? settings.rk4_step : 1e-4 * grid.horizon();
  IntegrationStats local;
  for (int k = 0; k + 1 < grid.size(); ++k) {
    if (settings.method == Integrator::rk4) {
      x = integrate_rk4(rhs, x, grid.node(k), grid.node(k + 1), rk4_step);
    } else {
      x = integrate_rk45(rhs, x, grid.node(k), grid.node(k + 1), opts, &local);
      opts.initial_step = local.suggested_step;
    }
    out.row(k + 1) = x.transpose();
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace smtraj
