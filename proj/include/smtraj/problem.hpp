#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "smtraj/descent_config.hpp"
#include "smtraj/surface.hpp"
#include "smtraj/types.hpp"

namespace smtraj {

enum class ControlKind { relay, u1, u2 };

std::string_view to_string(ControlKind kind);

struct EndpointTarget {
  int index = 0;  ///< 0-based state coordinate
  double value = 0.0;
};

/// A relay-controlled linear system x' = A x + B u with B = diag(E_m, 0),
/// its boundary data and the switching-surface family.
struct ProblemSpec {
  int n = 0;
  int m = 0;
  Mat A;
  Vec gain_upper;
  Vec gain_lower;
  Vec alpha;
  double horizon = 0.0;
  Vec x0;
  std::vector<EndpointTarget> endpoint;
  ControlKind control = ControlKind::relay;
  double u2_delta = 0.01;
  double u2_k = 1.0;
  SurfaceFamily surface;

  // Run settings carried by the problem file.
  Vec initial_params;
  int grid_nodes = 2001;
  DescentConfig descent;

  bool is_controlled(int i) const { return i < m; }
  bool uses_smooth_control() const { return control != ControlKind::relay; }

  /// Checks every invariant; throws ValidationError with a field path.
  void validate() const;
};

ProblemSpec load_problem(const std::filesystem::path& path);
ProblemSpec parse_problem(std::string_view json_text);

}  // namespace smtraj
