#pragma once

#include <cmath>
#include <random>
#include <string>

#include "smtraj/controls.hpp"
#include "smtraj/descent.hpp"
#include "smtraj/functionals.hpp"
#include "smtraj/gradients.hpp"
#include "smtraj/grid.hpp"
#include "smtraj/inclusion.hpp"
#include "smtraj/problem.hpp"
#include "smtraj/reference.hpp"

namespace smtraj::testing {

inline std::string problem_path(const std::string& name) { return std::string(SMTRAJ_PROBLEMS_DIR) + "/" + name; }

inline ProblemSpec example1() { return load_problem(problem_path("example1.json")); }
inline ProblemSpec example2() { return load_problem(problem_path("example2.json")); }

// Surface rows with every coefficient and offset free: s_i = sum_j p x_j - p.
inline SurfaceFamily all_free_surface(int m, int n) {
  std::vector<std::vector<SurfaceEntry>> coeffs(m, std::vector<SurfaceEntry>(n));
  std::vector<SurfaceEntry> offsets(m);
  int slot = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) coeffs[i][j] = SurfaceEntry::free(slot++);
    offsets[i] = SurfaceEntry::free(slot++);
  }
  return SurfaceFamily(std::move(coeffs), std::move(offsets));
}

struct RandomPoint {
  ProblemSpec spec;
  TimeGrid grid{2, 1.0};
  DerivativeGrid z;
  Vec p;
};

// Random instance whose state stays away from the coordinate hyperplanes and
// whose nodes avoid every kink of the integrand by at least `margin`
// (h_i = 0 boundary for the relay, s = +-delta for u2).
class PointSampler {
 public:
  explicit PointSampler(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  RandomPoint draw(ControlKind kind, int nodes = 41, double margin = 1e-3) {
    for (;;) {
      RandomPoint pt = candidate(kind, nodes);
      if (kink_free(pt, margin)) return pt;
    }
  }

 private:
  RandomPoint candidate(ControlKind kind, int nodes) {
    RandomPoint pt;
    ProblemSpec& s = pt.spec;
    s.n = 3;
    s.m = kind == ControlKind::relay ? 1 + static_cast<int>(uniform(0.0, 2.0)) : 2;
    s.A = Mat(s.n, s.n);
    for (int i = 0; i < s.n; ++i)
      for (int j = 0; j < s.n; ++j) s.A(i, j) = uniform(-1.0, 1.0);
    s.gain_upper = Vec(s.m);
    for (int i = 0; i < s.m; ++i) s.gain_upper[i] = uniform(0.05, 0.3);
    s.gain_lower = s.gain_upper;
    s.alpha = Vec(s.m);
    for (int i = 0; i < s.m; ++i) s.alpha[i] = uniform(0.5, 3.0);
    s.horizon = uniform(0.5, 1.0);
    s.x0 = Vec(s.n);
    for (int j = 0; j < s.n; ++j) s.x0[j] = (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(4.0, 6.0);
    s.endpoint = {{0, uniform(-1.0, 1.0)}, {2, uniform(-1.0, 1.0)}};
    s.control = kind;
    s.u2_delta = 0.05;
    s.u2_k = uniform(0.5, 2.0);
    s.surface = all_free_surface(s.m, s.n);
    s.initial_params = Vec::Zero(s.surface.param_dim());
    s.validate();

    pt.grid = TimeGrid(nodes, s.horizon);
    pt.z = DerivativeGrid::zeros(nodes, s.n);
    Vec amp(s.n), freq(s.n), phase(s.n), bias(s.n);
    for (int j = 0; j < s.n; ++j) {
      amp[j] = uniform(0.2, 2.0);
      freq[j] = uniform(0.5, 4.0);
      phase[j] = uniform(0.0, 6.3);
      bias[j] = uniform(-2.0, 2.0);
    }
    for (int k = 0; k < nodes; ++k)
      for (int j = 0; j < s.n; ++j)
        pt.z.values(k, j) = bias[j] + amp[j] * std::sin(freq[j] * pt.grid.node(k) + phase[j]);

    // Coefficients of order 0.1 keep s in the range where u1 and u2 are
    // genuinely nonlinear.
    pt.p = Vec(s.surface.param_dim());
    for (int k = 0; k < pt.p.size(); ++k) pt.p[k] = uniform(-0.1, 0.1);
    return pt;
  }

  bool kink_free(const RandomPoint& pt, double margin) const {
    const ProblemSpec& s = pt.spec;
    const StateGrid x = build_state(pt.grid, pt.z, s.x0);
    for (int k = 0; k < pt.grid.size(); ++k) {
      const Vec xk = x.values.row(k).transpose();
      if (xk.cwiseAbs().minCoeff() < 0.5) return false;
      const Vec sk = s.surface.eval(xk, pt.p);
      for (int i = 0; i < s.m; ++i) {
        const double gap = pt.z.values(k, i) - s.A.row(i).dot(xk);
        if (s.control == ControlKind::relay) {
          if (std::abs(std::abs(gap) - s.gain_upper[i] * l1_norm(xk)) < margin) return false;
        } else if (s.control == ControlKind::u2) {
          if (std::abs(std::abs(sk[i]) - s.u2_delta) < margin) return false;
        }
      }
    }
    return true;
  }

  std::mt19937_64 rng_;
};

// The relay functional is piecewise quadratic, so its differences carry no
// truncation error and a larger step only reduces rounding noise; the smooth
// controls need a smaller step to keep the truncation term down.
inline double fd_step_for(ControlKind kind) { return kind == ControlKind::relay ? 1e-4 : 2e-5; }

// Fourth-order central-difference bundle of the serial reference functional.
inline GradientBundle fd_bundle(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p,
                                double step) {
  ScalarFunctional f = [&](const DerivativeGrid& zz, const Vec& pp) {
    return reference::evaluate(spec, grid, zz, pp).total;
  };
  return fd_gradient(f, grid, z, p, step);
}

}  // namespace smtraj::testing
