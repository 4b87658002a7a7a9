// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "smtraj/verification.hpp"
#include "support.hpp"

using namespace smtraj;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome initial_example1() {
  const ProblemSpec s = smtraj::testing::example1();
  const TimeGrid g(s.grid_nodes, s.horizon);
  const auto t0 = Clock::now();
  const double total = eval_I(s, g, DerivativeGrid::zeros(g.size(), s.n), s.initial_params).total;
  const double dt = seconds_since(t0);
  return {std::abs(total - 37.0) <= 1e-12 && dt < 0.1, fmt("I=%.17g, |I-37|=%.2e, %.4fs", total, std::abs(total - 37.0), dt)};
}

Outcome initial_example2() {
  const ProblemSpec s = smtraj::testing::example2();
  const TimeGrid g(s.grid_nodes, s.horizon);
  const auto t0 = Clock::now();
  const double total = eval_I12(s, g, DerivativeGrid::zeros(g.size(), s.n), s.initial_params).total;
  const double dt = seconds_since(t0);
  const double rel = std::abs(total - 1591.75905) / 1591.75905;
  return {rel <= 1e-4 && dt < 0.1, fmt("I=%.10g, rel=%.2e, %.4fs", total, rel, dt)};
}

struct SolveCheck {
  SolveReport report;
  VerifyReport verify;
  double seconds = 0.0;
  double param_dist = 0.0;
};

SolveCheck run_solve(const ProblemSpec& s, const Vec& published) {
  const TimeGrid g(s.grid_nodes, s.horizon);
  SolveCheck out;
  const auto t0 = Clock::now();
  out.report = solve(s, g, DerivativeGrid::zeros(g.size(), s.n), s.initial_params, s.descent);
  out.verify = verify(s, g, out.report.p);
  out.seconds = seconds_since(t0);
  out.param_dist = (out.report.p - published).cwiseAbs().maxCoeff();
  return out;
}

Outcome solve_example1() {
  const ProblemSpec s = smtraj::testing::example1();
  const SolveCheck r = run_solve(s, (Vec(2) << 0.98467, 0.93868).finished());
  const double total = r.report.final_value.total;
  const double x1 = r.verify.endpoint_values[0];
  const bool pass = total <= 1e-3 && r.report.outer_iters <= 200 && r.param_dist <= 0.05 && std::abs(x1) <= 1e-2 &&
                    r.seconds < 60.0;
  return {pass, fmt("I=%.3e after %d iters, c=(%.5f, %.5f) dist=%.4f, x1(1)=%.5f, %.2fs", total, r.report.outer_iters,
                    r.report.p[0], r.report.p[1], r.param_dist, x1, r.seconds)};
}

Outcome solve_example2() {
  const ProblemSpec s = smtraj::testing::example2();
  const SolveCheck r = run_solve(s, (Vec(4) << 0.1836729, 0.2016907, 0.1139969, 0.4974675).finished());
  const double total = r.report.final_value.total;
  const double worst = r.verify.endpoint_errors.maxCoeff();
  const bool pass = total <= 1e-2 && r.report.outer_iters <= 500 && r.param_dist <= 0.05 && worst <= 1e-2 &&
                    r.seconds < 120.0;
  const Vec& e = r.verify.endpoint_values;
  return {pass, fmt("I=%.3e after %d iters, (c,b) dist=%.4f, x(T)=(%.5f, %.5f, %.5f) worst err=%.2e, %.2fs", total,
                    r.report.outer_iters, r.param_dist, e[0], e[1], e[2], worst, r.seconds)};
}

Outcome gradient_oracle() {
  smtraj::testing::PointSampler sampler(20240501);
  double worst_z = 0.0, worst_p = 0.0;
  int points = 0;
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    for (int trial = 0; trial < 20; ++trial, ++points) {
      const auto pt = sampler.draw(kind, 41);
      const GradientBundle an = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p).gradient;
      const GradientBundle fd = smtraj::testing::fd_bundle(pt.spec, pt.grid, pt.z, pt.p, smtraj::testing::fd_step_for(kind));
      worst_z = std::max(worst_z, relative_error(an.g_z, fd.g_z));
      worst_p = std::max(worst_p, relative_error(an.g_p, fd.g_p));
    }
  }
  return {worst_z <= 1e-6 && worst_p <= 1e-8,
          fmt("%d points, worst z-part %.2e, worst p-part %.2e", points, worst_z, worst_p)};
}

Outcome brute_force_h() {
  smtraj::testing::PointSampler sampler(6);
  ProblemSpec s = smtraj::testing::example1();
  s.m = 2;
  s.gain_upper = Vec::Ones(2);
  int mismatches = 0, membership_errors = 0, zeros = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) s.A(r, c) = sampler.uniform(-2, 2);
    s.gain_upper[0] = sampler.uniform(0.01, 3);
    s.gain_upper[1] = sampler.uniform(0.01, 3);
    const int i = std::min(2, static_cast<int>(sampler.uniform(0, 3)));
    Vec x(3);
    for (int j = 0; j < 3; ++j) x[j] = sampler.uniform(-5, 5);
    const double z = sampler.uniform(-30, 30);
    const double h = h_value(s, i, x, z);
    double brute = 0.0;
    for (double psi : {-1.0, 1.0}) brute = std::max(brute, z * psi - support_value(s, i, x, psi));
    if (h != brute) ++mismatches;
    if (i < s.m) {
      const double centre = s.A.row(i).dot(x);
      const double radius = s.gain_upper[i] * l1_norm(x);
      const bool inside = z >= centre - radius && z <= centre + radius;
      if ((h == 0.0) != inside) ++membership_errors;
      zeros += h == 0.0;
    }
  }
  return {mismatches == 0 && membership_errors == 0,
          fmt("10000 samples, %d value mismatches, %d membership mismatches (%d inside)", mismatches,
              membership_errors, zeros)};
}

Outcome c1_controls() {
  smtraj::testing::PointSampler sampler(7);
  double worst_match = 0.0, worst_jump = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double k = sampler.uniform(0.05, 20);
    const double delta = std::pow(10.0, sampler.uniform(-4, 0.5));
    const CubicCoeffs c = derive_cubic_coeffs(k, delta);
    const double value = k * std::sqrt(delta), slope = k / (2 * std::sqrt(delta));
    worst_match = std::max(worst_match, std::abs(c.e * delta * delta * delta + c.f * delta - value) / value);
    worst_match = std::max(worst_match, std::abs(3 * c.e * delta * delta + c.f - slope) / slope);
    for (double edge : {delta, -delta}) {
      const ShapeEval in = u2_shape(edge, k, delta, c);
      const ShapeEval out = u2_shape(std::nextafter(edge, 2 * edge), k, delta, c);
      worst_jump = std::max(worst_jump, std::abs(in.g - out.g) / std::abs(out.g));
      worst_jump = std::max(worst_jump, std::abs(in.dg - out.dg) / std::abs(out.dg));
    }
  }
  const double h = 1e-7;
  const double right = (u1_shape(h).g - u1_shape(0).g) / h;
  const double left = (u1_shape(0).g - u1_shape(-h).g) / h;
  const double u1_gap = std::max(std::abs(right - u1_shape(0).dg), std::abs(left - u1_shape(0).dg));
  return {worst_match <= 1e-12 && worst_jump <= 1e-10 && u1_gap <= 1e-6,
          fmt("matching %.2e, u2 jumps %.2e, u1 one-sided slopes (%.8f, %.8f) vs %.1f", worst_match, worst_jump, right,
              left, u1_shape(0).dg)};
}

Outcome superdifferential() {
  smtraj::testing::PointSampler sampler(8);
  ProblemSpec s = smtraj::testing::example1();
  int failures = 0, checked = 0;
  while (checked < 500) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) s.A(r, c) = sampler.uniform(-2, 2);
    s.gain_upper[0] = sampler.uniform(0.1, 2);
    const int zero = std::min(2, static_cast<int>(sampler.uniform(0, 3)));
    Vec x(3);
    for (int j = 0; j < 3; ++j) x[j] = (sampler.uniform(0, 1) < 0.5 ? -1 : 1) * sampler.uniform(0.5, 4);
    x[zero] = 0.0;
    const double z = sampler.uniform(-60, 60);
    if (h_value(s, 0, x, z) < 1e-2) continue;
    ++checked;
    const SuperdiffInterval d = superdifferential_h(s, 0, x, z);
    const double psi = psi_star(s, 0, x, z);
    const double a = s.gain_upper[0];
    bool ok = d.z_coeff == psi;
    for (int j = 0; j < 3; ++j) {
      const double smooth = -psi * s.A(0, j);
      if (j == zero) {
        ok = ok && d.x_part[j].lower == smooth - a * std::abs(psi) && d.x_part[j].upper == smooth + a * std::abs(psi);
        const double step = 1e-7;
        Vec up = x, down = x;
        up[j] = step;
        down[j] = -step;
        const double h0 = h_value(s, 0, x, z);
        const double right = (h_value(s, 0, up, z) - h0) / step;
        const double left = (h0 - h_value(s, 0, down, z)) / step;
        ok = ok && d.x_part[j].contains(right, 1e-6) && d.x_part[j].contains(left, 1e-6);
      } else {
        ok = ok && d.x_part[j].degenerate() && d.x_part[j].lower == smooth - a * std::abs(psi) * sign(x[j]);
      }
    }
    failures += !ok;
  }
  return {failures == 0, fmt("%d points with one zero coordinate, %d failures", checked, failures)};
}

Outcome rk4_order() {
  const OdeRhs growth = [](double, const Vec& x, Vec& dx) { dx = x; };
  const double e1 = std::abs(integrate_rk4(growth, Vec::Ones(1), 0, 1, 1e-2)[0] - std::exp(1.0));
  const double e2 = std::abs(integrate_rk4(growth, Vec::Ones(1), 0, 1, 5e-3)[0] - std::exp(1.0));
  return {e1 / e2 >= 8.0, fmt("err(h=1e-2)=%.3e, err(h=5e-3)=%.3e, ratio=%.2f", e1, e2, e1 / e2)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"example 1 initial functional equals 37", initial_example1},
      {"example 2 initial functional matches 1591.75905", initial_example2},
      {"example 1 solve and closed-loop check", solve_example1},
      {"example 2 solve and closed-loop check", solve_example2},
      {"analytic gradients match finite differences", gradient_oracle},
      {"closed-form h equals brute force", brute_force_h},
      {"C1 smooth controls", c1_controls},
      {"superdifferential at a zero coordinate", superdifferential},
      {"RK4 convergence order", rk4_order},
  };
  int failed = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index++, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", index - 1 - failed, index - 1);
  return failed == 0 ? 0 : 1;
}
