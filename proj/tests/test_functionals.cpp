#include <doctest.h>

#include <cmath>

#include "smtraj/kernels.hpp"
#include "support.hpp"

using namespace smtraj;
using smtraj::testing::example1;
using smtraj::testing::example2;

TEST_CASE("example 1 initial value decomposes exactly") {
  const ProblemSpec s = example1();
  const TimeGrid g(s.grid_nodes, s.horizon);
  const DerivativeGrid z = DerivativeGrid::zeros(g.size(), s.n);
  const FunctionalBreakdown b = eval_I(s, g, z, s.initial_params);
  CHECK(b.phi == 32.5);
  CHECK(b.chi == 4.5);
  CHECK(b.omega == 0.0);
  CHECK(b.total == 37.0);
  CHECK(eval_phi(s, g, z) == 32.5);
  CHECK(eval_chi(s, g, z) == 4.5);
}

TEST_CASE("example 1 surface offset shift gives omega one half") {
  const ProblemSpec s = example1();
  const TimeGrid g(101, s.horizon);
  const DerivativeGrid z = DerivativeGrid::zeros(g.size(), s.n);
  CHECK(eval_omega(s, g, z, (Vec(2) << 1, 2).finished()) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("example 2 initial value") {
  const ProblemSpec s = example2();
  const TimeGrid g(s.grid_nodes, s.horizon);
  const DerivativeGrid z = DerivativeGrid::zeros(g.size(), s.n);
  const FunctionalBreakdown b = eval_I12(s, g, z, s.initial_params);
  CHECK(b.chi == doctest::Approx(11.6275).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(1591.75905).epsilon(1e-6));
  CHECK(b.omega == 0.0);

  // z = 0 keeps x = x0, so each residual is constant in time.
  const double r1 = 0.0 - 10.0 + 300.0 * 0.24 * std::exp(-0.24);
  const double r2 = 0.0 - 6.0 - 300.0 * 0.91 * std::exp(-0.91);
  const double r3 = 0.0 - 14.0;
  CHECK(r1 == doctest::Approx(46.637).epsilon(1e-5));
  CHECK(r2 == doctest::Approx(-115.889).epsilon(1e-5));
  CHECK(b.phi == doctest::Approx(0.5 * (r1 * r1 + r2 * r2 + r3 * r3) * s.horizon).epsilon(1e-12));
}

TEST_CASE("problem kind dispatch") {
  const ProblemSpec s1 = example1();
  const ProblemSpec s2 = example2();
  const TimeGrid g(11, 1.0);
  CHECK_THROWS_AS(eval_I12(s1, g, DerivativeGrid::zeros(11, 3), s1.initial_params), std::invalid_argument);
  CHECK_THROWS_AS(eval_I(s2, g, DerivativeGrid::zeros(11, 3), s2.initial_params), std::invalid_argument);
  CHECK(evaluate(s1, g, DerivativeGrid::zeros(11, 3), s1.initial_params).total > 0.0);
}

TEST_CASE("exact feasible trajectory has zero value and zero gradient") {
  ProblemSpec s = example1();
  s.x0 = Vec::Zero(3);
  s.endpoint = {{0, 0.0}};
  const TimeGrid g(51, 1.0);
  const DerivativeGrid z = DerivativeGrid::zeros(51, 3);
  const Vec p = (Vec(2) << 1, 0).finished();
  const ValueAndGradient vg = evaluate_with_gradient(s, g, z, p);
  CHECK(vg.value.total == 0.0);
  CHECK(vg.gradient.norm == 0.0);
}

TEST_CASE("gradients at the example initial points agree with differences") {
  for (const ProblemSpec& s : {example1(), example2()}) {
    const TimeGrid g(61, s.horizon);
    const DerivativeGrid z = DerivativeGrid::zeros(g.size(), s.n);
    const GradientBundle an = evaluate_with_gradient(s, g, z, s.initial_params).gradient;
    const GradientBundle fd = smtraj::testing::fd_bundle(s, g, z, s.initial_params, smtraj::testing::fd_step_for(s.control));
    CHECK(relative_error(an.g_z, fd.g_z) <= 1e-6);
    CHECK(relative_error(an.g_p, fd.g_p, 1e-8) <= 1e-8);
  }
}

TEST_CASE("finite-difference oracle on a quadratic functional") {
  const TimeGrid g(21, 1.0);
  DerivativeGrid z = DerivativeGrid::zeros(21, 2);
  for (int k = 0; k < 21; ++k) z.values.row(k) << std::sin(k), std::cos(k);
  const Vec p = (Vec(1) << 0.3).finished();
  ScalarFunctional f = [&](const DerivativeGrid& zz, const Vec& pp) {
    return 0.5 * quadrature(g, zz.values.rowwise().squaredNorm()) + 0.5 * pp.squaredNorm();
  };
  const GradientBundle fd = fd_gradient(f, g, z, p, 1e-4);
  CHECK(relative_error(fd.g_z, z.values) <= 1e-9);
  CHECK(fd.g_p[0] == doctest::Approx(0.3).epsilon(1e-9));

  ScalarFunctional bad = [](const DerivativeGrid&, const Vec&) { return std::nan(""); };
  CHECK_THROWS_AS(fd_gradient(bad, g, z, p, 1e-4), NonFiniteError);
}

TEST_CASE("property: parts are nonnegative and evaluation is pure") {
  smtraj::testing::PointSampler sampler(51);
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto pt = sampler.draw(kind, 31);
      const FunctionalBreakdown a = evaluate(pt.spec, pt.grid, pt.z, pt.p);
      const FunctionalBreakdown b = evaluate(pt.spec, pt.grid, pt.z, pt.p);
      CHECK(a.phi >= 0.0);
      CHECK(a.chi >= 0.0);
      CHECK(a.omega >= 0.0);
      CHECK(a.total == a.phi + a.chi + a.omega);
      CHECK(a.total == b.total);
    }
  }
}

TEST_CASE("property: phi vanishes exactly when every node satisfies the inclusion") {
  ProblemSpec s = example1();
  const TimeGrid g(41, 1.0);
  auto scan = [&](const DerivativeGrid& z) {
    const StateGrid x = build_state(g, z, s.x0);
    for (int k = 0; k < g.size(); ++k)
      for (int i = 0; i < s.n; ++i)
        if (h_value(s, i, x.values.row(k).transpose(), z.values(k, i)) != 0.0) return false;
    return true;
  };
  const DerivativeGrid zero = DerivativeGrid::zeros(41, 3);
  CHECK_FALSE(scan(zero));
  CHECK(eval_phi(s, g, zero) > 0.0);

  s.A.setZero();
  s.x0 = (Vec(3) << 1, 0, 0).finished();
  DerivativeGrid ok = DerivativeGrid::zeros(41, 3);
  ok.values.col(0).setConstant(0.5);
  CHECK(scan(ok));
  CHECK(eval_phi(s, g, ok) == 0.0);
}

TEST_CASE("property: refinement converges at second order") {
  const ProblemSpec s = example2();
  auto value_at = [&](int nodes) {
    const TimeGrid g(nodes, s.horizon);
    DerivativeGrid z = DerivativeGrid::zeros(nodes, 3);
    for (int k = 0; k < nodes; ++k) z.values.row(k) << std::cos(20 * g.node(k)), 2.0, -std::sin(10 * g.node(k));
    return evaluate(s, g, z, s.initial_params).total;
  };
  const double a = value_at(101), b = value_at(201), c = value_at(401);
  CHECK((a - b) / (b - c) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("property: serial and parallel kernels are bit-identical") {
  smtraj::testing::PointSampler sampler(52);
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    const auto pt = sampler.draw(kind, 501);
    const StateGrid x = build_state(pt.grid, pt.z, pt.spec.x0);
    const NodeTerms a = evaluate_nodes(pt.spec, x, pt.z, pt.p, true, Exec::serial);
    const NodeTerms b = evaluate_nodes(pt.spec, x, pt.z, pt.p, true, Exec::parallel);
    CHECK(a.phi == b.phi);
    CHECK(a.omega == b.omega);
    CHECK(a.dz == b.dz);
    CHECK(a.dx == b.dx);
    CHECK(a.dp == b.dp);
    const ValueAndGradient vs = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p, Exec::serial);
    const ValueAndGradient vp = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p, Exec::parallel);
    CHECK(vs.value.total == vp.value.total);
    CHECK(vs.gradient.g_z == vp.gradient.g_z);
    CHECK(vs.gradient.g_p == vp.gradient.g_p);
  }
}

TEST_CASE("property: fused kernels agree with the reference implementation") {
  smtraj::testing::PointSampler sampler(53);
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto pt = sampler.draw(kind, 81);
      const ValueAndGradient fused = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p);
      const FunctionalBreakdown rv = reference::evaluate(pt.spec, pt.grid, pt.z, pt.p);
      const GradientBundle rg = reference::gradient(pt.spec, pt.grid, pt.z, pt.p);
      CHECK(fused.value.total == doctest::Approx(rv.total).epsilon(1e-12));
      CHECK(relative_error(fused.gradient.g_z, rg.g_z) <= 1e-12);
      CHECK(relative_error(fused.gradient.g_p, rg.g_p) <= 1e-12);
      CHECK(fused.gradient.norm == doctest::Approx(rg.norm).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: analytic gradients match differences at random smooth points") {
  smtraj::testing::PointSampler sampler(54);
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto pt = sampler.draw(kind, 31);
      const GradientBundle an = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p).gradient;
      const GradientBundle fd = smtraj::testing::fd_bundle(pt.spec, pt.grid, pt.z, pt.p, smtraj::testing::fd_step_for(kind));
      CHECK(relative_error(an.g_z, fd.g_z) <= 1e-6);
      CHECK(relative_error(an.g_p, fd.g_p) <= 1e-8);
    }
  }
}

TEST_CASE("property: the functional decreases along the negative gradient") {
  smtraj::testing::PointSampler sampler(55);
  for (ControlKind kind : {ControlKind::relay, ControlKind::u1, ControlKind::u2}) {
    const auto pt = sampler.draw(kind, 41);
    const ValueAndGradient vg = evaluate_with_gradient(pt.spec, pt.grid, pt.z, pt.p);
    bool decreased = false;
    for (double step = 1.0; step > 1e-12 && !decreased; step *= 0.5) {
      DerivativeGrid z = pt.z;
      z.values -= step * vg.gradient.g_z;
      const Vec p = pt.p - step * vg.gradient.g_p;
      decreased = evaluate(pt.spec, pt.grid, z, p).total < vg.value.total;
    }
    CHECK(decreased);
  }
}
