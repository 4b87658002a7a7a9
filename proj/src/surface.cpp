#include "smtraj/surface.hpp"

#include <algorithm>
#include <string>

namespace smtraj {

SurfaceFamily::SurfaceFamily(std::vector<std::vector<SurfaceEntry>> coeffs,
                             std::vector<SurfaceEntry> offsets)
    : coeffs_(std::move(coeffs)), offsets_(std::move(offsets)) {
  if (coeffs_.empty()) throw ValidationError("surface.rows", "at least one row is required");
  if (offsets_.size() != coeffs_.size())
    throw ValidationError("surface.rows", "every row needs an offset");
  cols_ = static_cast<int>(coeffs_.front().size());

  int max_slot = -1;
  auto note = [&](const SurfaceEntry& e, const std::string& where) {
    if (e.param < -1) throw ValidationError(where, "negative parameter slot");
    max_slot = std::max(max_slot, e.param);
  };
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::string row = "surface.rows[" + std::to_string(i) + "]";
    if (static_cast<int>(coeffs_[i].size()) != cols_)
      throw ValidationError(row + ".coeffs", "ragged coefficient rows");
    for (std::size_t j = 0; j < coeffs_[i].size(); ++j)
      note(coeffs_[i][j], row + ".coeffs[" + std::to_string(j) + "]");
    note(offsets_[i], row + ".offset");
  }
  param_dim_ = max_slot + 1;

  std::vector<bool> seen(param_dim_, false);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (const auto& e : coeffs_[i])
      if (e.is_free()) seen[e.param] = true;
    if (offsets_[i].is_free()) seen[offsets_[i].param] = true;
  }
  for (int k = 0; k < param_dim_; ++k)
    if (!seen[k])
      throw ValidationError("surface", "parameter slot " + std::to_string(k + 1) + " is never referenced");
}

void SurfaceFamily::check_args(const Vec& x, const Vec& p) const {
  if (x.size() != cols_)
    throw DimensionError("surface: state has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(cols_));
  if (p.size() != param_dim_)
    throw DimensionError("surface: parameter vector has length " + std::to_string(p.size()) +
                         ", expected " + std::to_string(param_dim_));
}

Vec SurfaceFamily::eval(const Vec& x, const Vec& p) const {
  check_args(x, p);
  Vec s(rows());
  for (int i = 0; i < rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += coeffs_[i][j].resolve(p) * x[j];
    s[i] = acc - offsets_[i].resolve(p);
  }
  return s;
}

Mat SurfaceFamily::jacobian_x(const Vec& p) const {
  if (p.size() != param_dim_) throw DimensionError("surface: parameter length mismatch");
  Mat w(rows(), cols_);
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols_; ++j) w(i, j) = coeffs_[i][j].resolve(p);
  return w;
}

Mat SurfaceFamily::jacobian_p(const Vec& x, const Vec& p) const {
  check_args(x, p);
  Mat d = Mat::Zero(rows(), param_dim_);
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols_; ++j)
      if (coeffs_[i][j].is_free()) d(i, coeffs_[i][j].param) += x[j];
    if (offsets_[i].is_free()) d(i, offsets_[i].param) -= 1.0;
  }
  return d;
}

}  // namespace smtraj
