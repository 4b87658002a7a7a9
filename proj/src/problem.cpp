#include "smtraj/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace smtraj {

using nlohmann::json;

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::relay: return "relay";
    case ControlKind::u1: return "u1";
    case ControlKind::u2: return "u2";
  }
  return "?";
}

void DescentConfig::validate() const {
  if (max_outer_iters < 0) throw ValidationError("descent.max_outer_iters", "must be >= 0");
  if (!(tol_I >= 0.0)) throw ValidationError("descent.tol_I", "must be >= 0");
  if (!(tol_grad >= 0.0)) throw ValidationError("descent.tol_grad", "must be >= 0");
  if (!(z_step_init > 0.0)) throw ValidationError("descent.z_step_init", "must be > 0");
  if (!(p_step_init > 0.0)) throw ValidationError("descent.p_step_init", "must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ValidationError("descent.backtrack", "must lie in (0,1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ValidationError("descent.armijo", "must lie in (0,1)");
  if (slow_inner_iters < 0) throw ValidationError("descent.slow_inner_iters", "must be >= 0");
  if (!(step_floor > 0.0)) throw ValidationError("descent.step_floor", "must be > 0");
  if (slow_warmup_iters < 0) throw ValidationError("descent.slow_warmup_iters", "must be >= 0");
  if (!(p_max_move >= 0.0)) throw ValidationError("descent.p_max_move", "must be >= 0");
  if (!(bb_max_ratio >= 1.0)) throw ValidationError("descent.bb_max_ratio", "must be >= 1");
  if (!(bb_min_ratio > 0.0 && bb_min_ratio <= 1.0)) throw ValidationError("descent.bb_min_ratio", "must lie in (0,1]");
}

void ProblemSpec::validate() const {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (m < 1 || m > n) throw ValidationError("m", "need 1 <= m <= n (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  if (A.rows() != n || A.cols() != n) throw ValidationError("A", "must be n x n");
  if (!A.allFinite()) throw ValidationError("A", "entries must be finite");
  auto check_gain = [&](const Vec& g, const char* name, bool required) {
    if (!required && g.size() == 0) return;
    if (g.size() != m) throw ValidationError(name, "length must equal m");
    for (int i = 0; i < g.size(); ++i)
      if (!(g[i] > 0.0) || !std::isfinite(g[i]))
        throw ValidationError(std::string(name) + "[" + std::to_string(i) + "]", "gain must be positive");
  };
  check_gain(gain_upper, "gain_upper", true);
  check_gain(gain_lower, "gain_lower", false);
  check_gain(alpha, "alpha", uses_smooth_control());
  if (gain_lower.size() == m)
    for (int i = 0; i < m; ++i)
      if (gain_lower[i] > gain_upper[i])
        throw ValidationError("gain_lower[" + std::to_string(i) + "]", "exceeds gain_upper");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("T", "horizon must be positive");
  if (x0.size() != n) throw ValidationError("x0", "length must equal n");
  std::set<int> seen;
  for (const auto& e : endpoint) {
    const std::string where = "endpoint." + std::to_string(e.index + 1);
    if (e.index < 0 || e.index >= n) throw ValidationError(where, "index out of range 1..n");
    if (!seen.insert(e.index).second) throw ValidationError(where, "duplicate endpoint index");
  }
  if (control == ControlKind::u2) {
    if (!(u2_delta > 0.0)) throw ValidationError("u2_delta", "must be > 0");
    if (!(u2_k > 0.0)) throw ValidationError("u2_k", "must be > 0");
  }
  if (surface.rows() != m) throw ValidationError("surface.rows", "row count must equal m");
  if (surface.cols() != n) throw ValidationError("surface.rows[0].coeffs", "length must equal n");
  if (initial_params.size() != surface.param_dim())
    throw ValidationError("initial_params", "length must equal the surface parameter count (" +
                                                std::to_string(surface.param_dim()) + ")");
  if (grid_nodes < 2) throw ValidationError("grid_nodes", "must be >= 2");
  descent.validate();
}

namespace {

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where, "expected an integer");
  return j.get<int>();
}

const json& required(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(key, "missing required field");
  return *it;
}

Vec vector_field(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where, "expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

SurfaceEntry entry(const json& j, const std::string& where) {
  if (j.is_object()) {
    const int slot = integer(required(j, "param"), where + ".param");
    if (slot < 1) throw ValidationError(where + ".param", "slots are 1-based");
    return SurfaceEntry::free(slot - 1);
  }
  return SurfaceEntry::fixed(number(j, where));
}

SurfaceFamily surface_field(const json& j) {
  const json& rows = j.contains("rows") ? j["rows"] : throw ValidationError("surface.rows", "missing");
  if (!rows.is_array()) throw ValidationError("surface.rows", "expected an array");
  std::vector<std::vector<SurfaceEntry>> coeffs;
  std::vector<SurfaceEntry> offsets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string row = "surface.rows[" + std::to_string(i) + "]";
    const json& r = rows[i];
    if (!r.contains("coeffs") || !r["coeffs"].is_array()) throw ValidationError(row + ".coeffs", "expected an array");
    std::vector<SurfaceEntry> c;
    for (std::size_t k = 0; k < r["coeffs"].size(); ++k)
      c.push_back(entry(r["coeffs"][k], row + ".coeffs[" + std::to_string(k) + "]"));
    coeffs.push_back(std::move(c));
    offsets.push_back(r.contains("offset") ? entry(r["offset"], row + ".offset") : SurfaceEntry::fixed(0.0));
  }
  return SurfaceFamily(std::move(coeffs), std::move(offsets));
}

DescentConfig descent_field(const json& j) {
  DescentConfig c;
  if (!j.is_object()) throw ValidationError("descent", "expected an object");
  auto opt = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number(j[key], std::string("descent.") + key);
  };
  auto opt_int = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = integer(j[key], std::string("descent.") + key);
  };
  opt_int("max_outer_iters", c.max_outer_iters);
  opt("tol_I", c.tol_I);
  opt("tol_grad", c.tol_grad);
  opt("z_step_init", c.z_step_init);
  c.p_step_init = c.z_step_init / 10.0;
  opt("p_step_init", c.p_step_init);
  opt("backtrack", c.backtrack);
  opt("armijo", c.armijo);
  opt_int("slow_inner_iters", c.slow_inner_iters);
  opt("step_floor", c.step_floor);
  opt("bb_max_ratio", c.bb_max_ratio);
  opt("bb_min_ratio", c.bb_min_ratio);
  opt_int("slow_warmup_iters", c.slow_warmup_iters);
  opt("p_max_move", c.p_max_move);
  if (j.contains("bb_trial_steps")) {
    if (!j["bb_trial_steps"].is_boolean()) throw ValidationError("descent.bb_trial_steps", "expected a boolean");
    c.bb_trial_steps = j["bb_trial_steps"].get<bool>();
  }
  return c;
}

}  // namespace

ProblemSpec parse_problem(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "problem file must hold a JSON object");

  ProblemSpec spec;
  spec.n = integer(required(doc, "n"), "n");
  spec.m = integer(required(doc, "m"), "m");
  if (spec.n < 1) throw ValidationError("n", "must be >= 1");
  if (spec.m < 1 || spec.m > spec.n)
    throw ValidationError("m", "need 1 <= m <= n (m=" + std::to_string(spec.m) + ", n=" + std::to_string(spec.n) + ")");

  const json& a = required(doc, "A");
  if (!a.is_array() || static_cast<int>(a.size()) != spec.n) throw ValidationError("A", "must have n rows");
  spec.A.resize(spec.n, spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const std::string where = "A[" + std::to_string(i) + "]";
    Vec row = vector_field(a[i], where);
    if (row.size() != spec.n) throw ValidationError(where, "row must have n entries");
    spec.A.row(i) = row.transpose();
  }

  spec.gain_upper = vector_field(required(doc, "gain_upper"), "gain_upper");
  spec.gain_lower = doc.contains("gain_lower") ? vector_field(doc["gain_lower"], "gain_lower") : spec.gain_upper;
  if (doc.contains("alpha")) spec.alpha = vector_field(doc["alpha"], "alpha");
  spec.horizon = number(required(doc, "T"), "T");
  spec.x0 = vector_field(required(doc, "x0"), "x0");

  if (doc.contains("endpoint")) {
    const json& ep = doc["endpoint"];
    if (!ep.is_object()) throw ValidationError("endpoint", "expected an object mapping index to target");
    for (auto it = ep.begin(); it != ep.end(); ++it) {
      const std::string where = "endpoint." + it.key();
      int idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoi(it.key(), &used);
        if (used != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError(where, "key must be a 1-based integer index");
      }
      spec.endpoint.push_back({idx - 1, number(it.value(), where)});
    }
  }

  const std::string kind = doc.value("control_kind", std::string("relay"));
  if (kind == "relay") spec.control = ControlKind::relay;
  else if (kind == "u1") spec.control = ControlKind::u1;
  else if (kind == "u2") spec.control = ControlKind::u2;
  else throw ValidationError("control_kind", "must be one of relay, u1, u2");
  if (doc.contains("u2_delta")) spec.u2_delta = number(doc["u2_delta"], "u2_delta");
  if (doc.contains("u2_k")) spec.u2_k = number(doc["u2_k"], "u2_k");

  spec.surface = surface_field(required(doc, "surface"));
  if (doc.contains("initial_params")) spec.initial_params = vector_field(doc["initial_params"], "initial_params");
  else spec.initial_params = Vec::Zero(spec.surface.param_dim());
  if (doc.contains("grid_nodes")) spec.grid_nodes = integer(doc["grid_nodes"], "grid_nodes");
  if (doc.contains("descent")) spec.descent = descent_field(doc["descent"]);

  spec.validate();
  return spec;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

}  // namespace smtraj
