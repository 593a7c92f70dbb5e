#pragma once

#include <cstdint>
#include <string>

namespace cpikan {

struct DerivativeCheckOptions {
  int networks = 50;  // random networks per family (cKAN and MLP)
  std::uint64_t seed = 2024;
  double tol_d1 = 1e-5;
  double tol_d2 = 1e-4;
  double tol_grad = 1e-4;
};

/// Worst relative discrepancies between the exact derivatives and
/// fourth-order central differences.
struct DerivativeCheckReport {
  int networks = 0;
  double worst_d1 = 0.0;    // input first derivatives
  double worst_d2 = 0.0;    // input second derivatives
  double worst_grad = 0.0;  // directional derivative of the loss
  bool passed = false;

  std::string summary() const;
};

/// Random small networks with random inputs, and random small loss problems
/// (all four kinds, scaled and unscaled, inverse reaction-diffusion included).
DerivativeCheckReport check_derivatives(const DerivativeCheckOptions& options);

}  // namespace cpikan
