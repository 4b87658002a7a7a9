#pragma once

#include <vector>

#include "smtraj/types.hpp"

namespace smtraj {

/// One entry of the surface matrix or offset vector: a fixed constant or a
/// reference to a free parameter slot (0-based).
struct SurfaceEntry {
  double value = 0.0;
  int param = -1;

  bool is_free() const { return param >= 0; }
  double resolve(const Vec& p) const { return is_free() ? p[param] : value; }

  static SurfaceEntry fixed(double v) { return {v, -1}; }
  static SurfaceEntry free(int slot) { return {0.0, slot}; }
};

/// Affine switching surface s_i(x, p) = sum_j w_ij(p) x_j - beta_i(p), where each
/// w_ij and beta_i is either a constant or one free parameter.
class SurfaceFamily {
 public:
  SurfaceFamily() = default;
  /// Throws ValidationError when rows are ragged or a slot in 0..param_dim-1
  /// is never referenced.
  SurfaceFamily(std::vector<std::vector<SurfaceEntry>> coeffs, std::vector<SurfaceEntry> offsets);

  int rows() const { return static_cast<int>(coeffs_.size()); }
  int cols() const { return cols_; }
  int param_dim() const { return param_dim_; }

  const std::vector<std::vector<SurfaceEntry>>& coeffs() const { return coeffs_; }
  const std::vector<SurfaceEntry>& offsets() const { return offsets_; }

  Vec eval(const Vec& x, const Vec& p) const;
  /// m x n, the resolved coefficient matrix.
  Mat jacobian_x(const Vec& p) const;
  /// m x param_dim.
  Mat jacobian_p(const Vec& x, const Vec& p) const;

  void check_args(const Vec& x, const Vec& p) const;

 private:
  std::vector<std::vector<SurfaceEntry>> coeffs_;
  std::vector<SurfaceEntry> offsets_;
  int cols_ = 0;
  int param_dim_ = 0;
};

}  // namespace smtraj
