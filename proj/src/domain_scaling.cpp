#include "cpikan/domain_scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cpikan {

ScaledDomain::ScaledDomain(std::vector<double> half_widths,
                           std::vector<double> scales, double final_time)
    : half_widths_(std::move(half_widths)),
      scales_(std::move(scales)),
      final_time_(final_time) {
  if (half_widths_.empty()) {
    throw std::invalid_argument("domain: at least one spatial axis required");
  }
  for (double m : half_widths_) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("domain: half widths must be positive");
    }
  }
  if (!(final_time_ >= 0.0)) {
    throw std::invalid_argument("domain: final time must be non-negative");
  }
}

ScaledDomain ScaledDomain::scaled(std::vector<double> half_widths,
                                  double final_time) {
  auto scales = half_widths;
  return ScaledDomain(std::move(half_widths), std::move(scales), final_time);
}

ScaledDomain ScaledDomain::unscaled(std::vector<double> half_widths,
                                    double final_time) {
  std::vector<double> ones(half_widths.size(), 1.0);
  return ScaledDomain(std::move(half_widths), std::move(ones), final_time);
}

bool ScaledDomain::is_identity() const {
  for (double s : scales_) {
    if (s != 1.0) return false;
  }
  return true;
}

double ScaledDomain::axis_to_reference(std::size_t axis, double x) const {
  if (std::abs(x) > half_widths_.at(axis) * (1.0 + 1e-14)) {
    throw std::out_of_range("domain: coordinate " + std::to_string(x) +
                            " outside [-M, M] on axis " + std::to_string(axis));
  }
  return x / scales_[axis];
}

double ScaledDomain::axis_to_physical(std::size_t axis, double xr) const {
  return xr * scales_.at(axis);
}

std::vector<double> ScaledDomain::to_reference(
    std::span<const double> physical) const {
  if (physical.size() != half_widths_.size()) {
    throw std::invalid_argument("domain: point dimension mismatch");
  }
  std::vector<double> out(physical.size());
  for (std::size_t i = 0; i < physical.size(); ++i) {
    out[i] = axis_to_reference(i, physical[i]);
  }
  return out;
}

std::vector<double> ScaledDomain::to_physical(
    std::span<const double> reference) const {
  if (reference.size() != half_widths_.size()) {
    throw std::invalid_argument("domain: point dimension mismatch");
  }
  std::vector<double> out(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    out[i] = axis_to_physical(i, reference[i]);
  }
  return out;
}

double ScaledDomain::derivative_factor(std::size_t axis, int order) const {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("domain: derivative order must be 1 or 2");
  }
  const double inv = 1.0 / scales_.at(axis);
  return order == 1 ? inv : inv * inv;
}

}  // namespace cpikan
