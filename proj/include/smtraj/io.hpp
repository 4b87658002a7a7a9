#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "smtraj/descent.hpp"
#include "smtraj/verification.hpp"

namespace smtraj {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Header `t,x1..xn,z1..zn`, one row per node.
std::string trajectory_csv(const TimeGrid& grid, const StateGrid& x, const NodeMatrix& z);
void write_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid, const StateGrid& x,
                          const NodeMatrix& z);

struct TrajectoryTable {
  Vec t;
  StateGrid x;
  NodeMatrix z;
};
TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

/// Per-iteration trace: iter,phase,phi,chi,omega,total,grad_norm,step.
std::string trace_csv(const SolveReport& report);

nlohmann::json to_json(const ProblemSpec& spec);
nlohmann::json to_json(const DescentConfig& config);
nlohmann::json to_json(const FunctionalBreakdown& value);
nlohmann::json to_json(const VerifyReport& report);
/// The report without the trajectory; parameters under "params".
nlohmann::json to_json(const SolveReport& report);

/// Reads {"params": [...]} (a solve report qualifies).
Vec read_params_json(const std::filesystem::path& path);

}  // namespace smtraj
