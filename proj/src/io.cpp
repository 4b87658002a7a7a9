#include "smtraj/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace smtraj {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const TimeGrid& grid, const StateGrid& x, const NodeMatrix& z) {
  if (x.nodes() != grid.size() || z.rows() != grid.size() || z.cols() != x.dim())
    throw DimensionError("trajectory_csv: inconsistent dimensions");
  std::string out = "t";
  for (int i = 1; i <= x.dim(); ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= x.dim(); ++i) out += ",z" + std::to_string(i);
  out += '\n';
  for (int k = 0; k < grid.size(); ++k) {
    out += format_double(grid.node(k));
    for (int i = 0; i < x.dim(); ++i) out += ',' + format_double(x.values(k, i));
    for (int i = 0; i < x.dim(); ++i) out += ',' + format_double(z(k, i));
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid, const StateGrid& x,
                          const NodeMatrix& z) {
  write_file_atomic(path, trajectory_csv(grid, x, z));
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  const long columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 3 || (columns - 1) % 2 != 0) throw std::runtime_error("trajectory header must be t,x1..xn,z1..zn");
  const int n = static_cast<int>((columns - 1) / 2);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw std::runtime_error("malformed number in trajectory row " + std::to_string(rows.size() + 1));
      row.push_back(v);
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    }
    if (static_cast<long>(row.size()) != columns) throw std::runtime_error("ragged trajectory row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  TrajectoryTable t;
  const int nodes = static_cast<int>(rows.size());
  t.t.resize(nodes);
  t.x.values.resize(nodes, n);
  t.z.resize(nodes, n);
  for (int k = 0; k < nodes; ++k) {
    t.t[k] = rows[k][0];
    for (int i = 0; i < n; ++i) {
      t.x.values(k, i) = rows[k][1 + i];
      t.z(k, i) = rows[k][1 + n + i];
    }
  }
  return t;
}

std::string trace_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "iter,phase,phi,chi,omega,total,grad_norm,step\n";
  for (const auto& r : report.iterations)
    out << r.iter << ',' << to_string(r.phase) << ',' << format_double(r.value.phi) << ','
        << format_double(r.value.chi) << ',' << format_double(r.value.omega) << ','
        << format_double(r.value.total) << ',' << format_double(r.grad_norm) << ',' << format_double(r.step)
        << '\n';
  return out.str();
}

namespace {

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json entry_json(const SurfaceEntry& e) {
  if (e.is_free()) return json{{"param", e.param + 1}};
  return e.value;
}

}  // namespace

json to_json(const DescentConfig& c) {
  return {{"max_outer_iters", c.max_outer_iters}, {"tol_I", c.tol_I},
          {"tol_grad", c.tol_grad},               {"z_step_init", c.z_step_init},
          {"p_step_init", c.p_step_init},         {"backtrack", c.backtrack},
          {"armijo", c.armijo},                   {"slow_inner_iters", c.slow_inner_iters},
          {"step_floor", c.step_floor},           {"bb_trial_steps", c.bb_trial_steps},
          {"bb_max_ratio", c.bb_max_ratio},       {"bb_min_ratio", c.bb_min_ratio},
          {"slow_warmup_iters", c.slow_warmup_iters}, {"p_max_move", c.p_max_move}};
}

json to_json(const ProblemSpec& spec) {
  json a = json::array();
  for (int i = 0; i < spec.n; ++i) a.push_back(vec_json(spec.A.row(i).transpose()));
  json endpoint = json::object();
  for (const auto& e : spec.endpoint) endpoint[std::to_string(e.index + 1)] = e.value;
  json rows = json::array();
  for (int i = 0; i < spec.surface.rows(); ++i) {
    json coeffs = json::array();
    for (const auto& c : spec.surface.coeffs()[i]) coeffs.push_back(entry_json(c));
    rows.push_back({{"coeffs", coeffs}, {"offset", entry_json(spec.surface.offsets()[i])}});
  }
  json j = {{"n", spec.n},
            {"m", spec.m},
            {"A", a},
            {"gain_upper", vec_json(spec.gain_upper)},
            {"T", spec.horizon},
            {"x0", vec_json(spec.x0)},
            {"endpoint", endpoint},
            {"control_kind", std::string(to_string(spec.control))},
            {"surface", {{"rows", rows}}},
            {"initial_params", vec_json(spec.initial_params)},
            {"grid_nodes", spec.grid_nodes},
            {"descent", to_json(spec.descent)}};
  if (spec.gain_lower.size()) j["gain_lower"] = vec_json(spec.gain_lower);
  if (spec.alpha.size()) j["alpha"] = vec_json(spec.alpha);
  if (spec.control == ControlKind::u2) {
    j["u2_delta"] = spec.u2_delta;
    j["u2_k"] = spec.u2_k;
  }
  return j;
}

json to_json(const FunctionalBreakdown& v) {
  return {{"phi", v.phi}, {"chi", v.chi}, {"omega", v.omega}, {"total", v.total}};
}

json to_json(const VerifyReport& r) {
  json idx = json::array();
  for (int j : r.endpoint_indices) idx.push_back(j + 1);
  return {{"endpoint_indices", idx},
          {"endpoint_values", vec_json(r.endpoint_values)},
          {"endpoint_errors", vec_json(r.endpoint_errors)},
          {"max_inclusion_residual", r.max_inclusion_residual},
          {"max_surface_residual", r.max_surface_residual},
          {"integrator", {{"name", r.integrator}, {"parameter", r.integrator_parameter}}},
          {"reduced_on_surface", r.reduced}};
}

json to_json(const SolveReport& r) {
  json iters = json::array();
  for (const auto& it : r.iterations) {
    json row = to_json(it.value);
    row["iter"] = it.iter;
    row["phase"] = std::string(to_string(it.phase));
    row["grad_norm"] = it.grad_norm;
    row["step"] = it.step;
    iters.push_back(row);
  }
  return {{"params", vec_json(r.p)},
          {"final", to_json(r.final_value)},
          {"final_grad_norm", r.final_grad_norm},
          {"outer_iters", r.outer_iters},
          {"converged", r.converged},
          {"reason", std::string(to_string(r.reason))},
          {"kink_nodes", r.kink_nodes},
          {"iterations", iters}};
}

Vec read_params_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot open parameter file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_array())
    throw ValidationError("params", "expected an array of numbers");
  const auto values = doc["params"].get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace smtraj
