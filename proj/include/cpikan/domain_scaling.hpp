#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cpikan {

/// Affine map between the physical box prod_i [-M_i, M_i] and the network's
/// coordinate box. Each axis i is divided by scales[i]: scales == half_widths
/// gives the reference box [-1, 1]^d, scales == 1 keeps physical coordinates
/// (the unscaled baselines). Time is never rescaled.
class ScaledDomain {
 public:
  /// Maps every axis onto [-1, 1].
  static ScaledDomain scaled(std::vector<double> half_widths,
                             double final_time);
  /// Identity map over the same physical box.
  static ScaledDomain unscaled(std::vector<double> half_widths,
                               double final_time);

  std::size_t spatial_dim() const { return half_widths_.size(); }
  const std::vector<double>& half_widths() const { return half_widths_; }
  const std::vector<double>& scales() const { return scales_; }
  double final_time() const { return final_time_; }
  bool is_identity() const;

  /// x_i / scale_i. Throws std::out_of_range outside the physical box.
  std::vector<double> to_reference(std::span<const double> physical) const;
  std::vector<double> to_physical(std::span<const double> reference) const;

  double axis_to_reference(std::size_t axis, double x) const;
  double axis_to_physical(std::size_t axis, double xr) const;

  /// (1 / scale_axis)^order, the factor turning a reference-coordinate
  /// derivative into the physical one.
  double derivative_factor(std::size_t axis, int order) const;

 private:
  ScaledDomain(std::vector<double> half_widths, std::vector<double> scales,
               double final_time);

  std::vector<double> half_widths_;
  std::vector<double> scales_;
  double final_time_;
};

}  // namespace cpikan
