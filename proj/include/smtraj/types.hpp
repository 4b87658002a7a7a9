#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace smtraj {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Per-node samples, one row per grid node and one column per state coordinate.
using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Execution policy for the node-parallel kernels. Both policies produce
/// bit-identical results: node terms are computed independently and every
/// reduction runs serially in node order.
enum class Exec { serial, parallel };

/// Raised for malformed inputs. `where` names the offending field
/// (e.g. "A[2]" or "surface.rows[0].offset").
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Dimension disagreement between arguments of a numerical routine.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A functional or integrator produced NaN/Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace smtraj
