// Command-line front end: solve, eval, gradcheck, verify, cubic-coeffs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "smtraj/controls.hpp"
#include "smtraj/descent.hpp"
#include "smtraj/functionals.hpp"
#include "smtraj/gradients.hpp"
#include "smtraj/io.hpp"
#include "smtraj/problem.hpp"
#include "smtraj/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smtraj;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitVerification = 3;

struct Common {
  std::string problem;
  std::optional<int> grid;
};

struct SolveArgs {
  Common common;
  std::string out_dir;
  std::optional<int> max_iter;
  std::optional<double> tol_i;
  std::optional<double> tol_grad;
  std::string method = "rk45";
  double h = 0.0;
  double endpoint_tol = 1e-2;
  double inclusion_tol = 1e-2;
};

struct EvalArgs {
  Common common;
  std::string params;
  std::string trajectory;
};

struct GradcheckArgs {
  Common common;
  std::string params;
  double step = 1e-4;
  double tol = 1e-6;
};

struct VerifyArgs {
  Common common;
  std::string params;
  std::string method = "rk45";
  double h = 0.0;
  std::string out;
};

IntegratorSettings integrator_settings(const std::string& method, double h) {
  IntegratorSettings s;
  s.method = method == "rk4" ? Integrator::rk4 : Integrator::rk45;
  s.rk4_step = h;
  return s;
}

ProblemSpec load(const Common& c) {
  ProblemSpec spec = load_problem(c.problem);
  if (c.grid) {
    if (*c.grid < 2) throw ValidationError("--grid", "must be >= 2");
    spec.grid_nodes = *c.grid;
  }
  return spec;
}

Vec params_or_initial(const ProblemSpec& spec, const std::string& path) {
  if (path.empty()) return spec.initial_params;
  Vec p = read_params_json(path);
  if (p.size() != spec.surface.param_dim())
    throw ValidationError("params", "length " + std::to_string(p.size()) + " differs from the surface parameter count");
  return p;
}

bool verify_passes(const ProblemSpec& spec, const VerifyReport& rep, double endpoint_tol, double inclusion_tol) {
  const bool endpoints_ok = rep.endpoint_errors.size() == 0 || rep.endpoint_errors.maxCoeff() <= endpoint_tol;
  const bool inclusion_ok = spec.uses_smooth_control() || rep.max_inclusion_residual <= inclusion_tol;
  return endpoints_ok && inclusion_ok;
}

int run_solve(const SolveArgs& a) {
  ProblemSpec spec = load(a.common);
  DescentConfig cfg = spec.descent;
  if (a.max_iter) cfg.max_outer_iters = *a.max_iter;
  if (a.tol_i) cfg.tol_I = *a.tol_i;
  if (a.tol_grad) cfg.tol_grad = *a.tol_grad;
  cfg.validate();
  spec.descent = cfg;

  const TimeGrid grid(spec.grid_nodes, spec.horizon);
  const SolveReport report = solve(spec, grid, DerivativeGrid::zeros(grid.size(), spec.n), spec.initial_params, cfg);
  const StateGrid x = build_state(grid, report.z, spec.x0);

  json verify_json;
  bool verified = false;
  try {
    const IntegratorSettings settings = integrator_settings(a.method, a.h);
    const VerifyReport vr = verify(spec, grid, report.p, settings);
    verify_json = to_json(vr);
    const double gap = trajectory_gap(spec, x, vr.trajectory);
    verify_json["solver_closed_loop_gap"] = gap;
    verify_json["solver_closed_loop_gap_bound"] = std::max(5e-3, 10.0 * std::sqrt(2.0 * cfg.tol_I / spec.horizon));
    verified = verify_passes(spec, vr, a.endpoint_tol, a.inclusion_tol);
  } catch (const std::exception& e) {
    verify_json = {{"error", e.what()}};
  }
  verify_json["thresholds"] = {{"endpoint", a.endpoint_tol}, {"inclusion", a.inclusion_tol}};
  verify_json["passed"] = verified;

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  write_trajectory_csv(out / "trajectory.csv", grid, x, report.z.values);
  write_file_atomic(out / "trace.csv", trace_csv(report));
  write_file_atomic(out / "verify.json", verify_json.dump(2) + "\n");
  json rep = to_json(report);
  rep["problem"] = to_json(spec);
  rep["config"] = to_json(cfg);
  rep["grid"] = {{"nodes", grid.size()}, {"T", grid.horizon()}};
  rep["verify"] = verify_json;
  write_file_atomic(out / "report.json", rep.dump(2) + "\n");

  std::cout << json{{"total", report.final_value.total},
                    {"params", rep["params"]},
                    {"outer_iters", report.outer_iters},
                    {"reason", rep["reason"]},
                    {"verified", verified}}
                   .dump()
            << "\n";
  if (!report.converged) return kExitNotConverged;
  return verified ? kExitOk : kExitVerification;
}

int run_eval(const EvalArgs& a) {
  ProblemSpec spec = load(a.common);
  const Vec p = params_or_initial(spec, a.params);
  DerivativeGrid z;
  if (!a.trajectory.empty()) {
    z.values = read_trajectory_csv(a.trajectory).z;
    if (z.dim() != spec.n) throw ValidationError("trajectory", "column count does not match n");
    spec.grid_nodes = z.nodes();
  }
  const TimeGrid grid(spec.grid_nodes, spec.horizon);
  if (a.trajectory.empty()) z = DerivativeGrid::zeros(grid.size(), spec.n);
  std::cout << to_json(evaluate(spec, grid, z, p)).dump() << "\n";
  return kExitOk;
}

int run_gradcheck(const GradcheckArgs& a) {
  const ProblemSpec spec = load(a.common);
  const Vec p = params_or_initial(spec, a.params);
  const TimeGrid grid(spec.grid_nodes, spec.horizon);
  const DerivativeGrid z = DerivativeGrid::zeros(grid.size(), spec.n);
  const GradientBundle analytic = evaluate_with_gradient(spec, grid, z, p).gradient;
  const ScalarFunctional f = [&](const DerivativeGrid& zz, const Vec& pp) {
    return evaluate(spec, grid, zz, pp, Exec::serial).total;
  };
  const GradientBundle fd = fd_gradient(f, grid, z, p, a.step);

  auto elementwise = [](const Eigen::Ref<const Mat>& x, const Eigen::Ref<const Mat>& ref) {
    std::vector<double> errs;
    if (ref.size() == 0) return errs;
    const double floor = std::max(1e-6 * ref.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < ref.rows(); ++i)
      for (Eigen::Index j = 0; j < ref.cols(); ++j)
        errs.push_back(std::abs(x(i, j) - ref(i, j)) / std::max(std::abs(ref(i, j)), floor));
    std::sort(errs.begin(), errs.end());
    return errs;
  };
  const Mat az = analytic.g_z, fz = fd.g_z;
  const auto ez = elementwise(az, fz);
  const auto ep = elementwise(analytic.g_p, fd.g_p);
  auto median = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v[v.size() / 2]; };
  auto max = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); };
  const double z_block = relative_error(az, fz);
  const double p_block = relative_error(analytic.g_p, fd.g_p);
  const bool ok = z_block <= a.tol && p_block <= a.tol;
  std::cout << json{{"z_max_rel", max(ez)},    {"z_median_rel", median(ez)}, {"p_max_rel", max(ep)},
                    {"p_median_rel", median(ep)}, {"z_block_rel", z_block},   {"p_block_rel", p_block},
                    {"tolerance", a.tol},        {"passed", ok}}
                   .dump()
            << "\n";
  return ok ? kExitOk : kExitVerification;
}

int run_verify(const VerifyArgs& a) {
  const ProblemSpec spec = load(a.common);
  const Vec p = params_or_initial(spec, a.params);
  const TimeGrid grid(spec.grid_nodes, spec.horizon);
  const VerifyReport rep = verify(spec, grid, p, integrator_settings(a.method, a.h));
  const fs::path out = a.out.empty() ? fs::path("verify_trajectory.csv") : fs::path(a.out);
  write_trajectory_csv(out, grid, rep.trajectory, forward_difference_derivative(grid, rep.trajectory));
  json j = to_json(rep);
  j["trajectory_csv"] = out.string();
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int run_cubic(double k, double delta) {
  const CubicCoeffs c = derive_cubic_coeffs(k, delta);
  std::cout << json{{"e", c.e}, {"f", c.f}}.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mode trajectory solver for relay-controlled linear systems"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize the residual functional and verify the result");
  solve_cmd->add_option("problem", solve_args.common.problem, "Problem JSON file")->required();
  solve_cmd->add_option("--out", solve_args.out_dir, "Output directory")->required();
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "Maximum outer iterations");
  solve_cmd->add_option("--tol-i", solve_args.tol_i, "Stop when the functional falls below this value");
  solve_cmd->add_option("--tol-grad", solve_args.tol_grad, "Stop when the gradient norm falls below this value");
  solve_cmd->add_option("--grid", solve_args.common.grid, "Grid node count");
  solve_cmd->add_option("--method", solve_args.method, "Verification integrator")->check(CLI::IsMember({"rk45", "rk4"}));
  solve_cmd->add_option("--h", solve_args.h, "Fixed RK4 step (default 1e-4 T)");
  solve_cmd->add_option("--endpoint-tol", solve_args.endpoint_tol, "Closed-loop endpoint error threshold");
  solve_cmd->add_option("--inclusion-tol", solve_args.inclusion_tol, "Inclusion residual threshold (relay)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the functional breakdown");
  eval_cmd->add_option("problem", eval_args.common.problem, "Problem JSON file")->required();
  eval_cmd->add_option("--params", eval_args.params, "Parameter JSON ({\"params\": [...]})");
  eval_cmd->add_option("--trajectory", eval_args.trajectory, "Trajectory CSV supplying z (default z = 0)");
  eval_cmd->add_option("--grid", eval_args.common.grid, "Grid node count");

  GradcheckArgs grad_args;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients at z = 0");
  grad_cmd->add_option("problem", grad_args.common.problem, "Problem JSON file")->required();
  grad_cmd->add_option("--params", grad_args.params, "Parameter JSON");
  grad_cmd->add_option("--grid", grad_args.common.grid, "Grid node count");
  grad_cmd->add_option("--step", grad_args.step, "Central-difference step");
  grad_cmd->add_option("--tol", grad_args.tol, "Relative error tolerance");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Integrate the closed loop for given parameters");
  verify_cmd->add_option("problem", verify_args.common.problem, "Problem JSON file")->required();
  verify_cmd->add_option("params", verify_args.params, "Parameter JSON")->required();
  verify_cmd->add_option("--method", verify_args.method, "Integrator")->check(CLI::IsMember({"rk45", "rk4"}));
  verify_cmd->add_option("--h", verify_args.h, "Fixed RK4 step (default 1e-4 T)");
  verify_cmd->add_option("--grid", verify_args.common.grid, "Grid node count");
  verify_cmd->add_option("--out", verify_args.out, "Trajectory CSV path");

  double cubic_k = 0.0, cubic_delta = 0.0;
  auto* cubic_cmd = app.add_subcommand("cubic-coeffs", "C^1 cubic coefficients of the u2 control");
  cubic_cmd->add_option("--k", cubic_k, "Square-root gain k")->required();
  cubic_cmd->add_option("--delta", cubic_delta, "Boundary-layer half width")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*grad_cmd) return run_gradcheck(grad_args);
    if (*verify_cmd) return run_verify(verify_args);
    if (*cubic_cmd) return run_cubic(cubic_k, cubic_delta);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitValidation;
}
