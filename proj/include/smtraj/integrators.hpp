#pragma once

#include <functional>
#include <stdexcept>

#include "smtraj/grid.hpp"

namespace smtraj {

using OdeRhs = std::function<void(double t, const Vec& x, Vec& dxdt)>;

/// The adaptive integrator could not keep the local error below tolerance
/// without shrinking the step under its floor.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rk45Options {
  double atol = 1e-9;
  double rtol = 1e-9;
  /// 0 lets the integrator pick a first step.
  double initial_step = 0.0;
  /// Relative to the integration span.
  double min_step_fraction = 1e-14;
  long max_steps = 10'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  double last_step = 0.0;
  /// Step the controller would try next; seeds a continuation call.
  double suggested_step = 0.0;
};

/// Classical fixed-step RK4 from t0 to t1. The step is shrunk so an integer
/// number of steps covers the span exactly.
Vec integrate_rk4(const OdeRhs& rhs, const Vec& x0, double t0, double t1, double step);

/// Dormand-Prince 5(4) with standard step control. `stats.suggested_step`
/// can seed the next call.
Vec integrate_rk45(const OdeRhs& rhs, const Vec& x0, double t0, double t1, const Rk45Options& options,
                   IntegrationStats* stats = nullptr);

enum class Integrator { rk45, rk4 };

struct IntegratorSettings {
  Integrator method = Integrator::rk45;
  Rk45Options rk45;
  /// Fixed RK4 step; 0 means 1e-4 * T.
  double rk4_step = 0.0;
};

/// Integrates node to node so every grid node is hit exactly.
NodeMatrix integrate_on_grid(const OdeRhs& rhs, const Vec& x0, const TimeGrid& grid, const IntegratorSettings& settings,
                             IntegrationStats* stats = nullptr);

}  // namespace smtraj
