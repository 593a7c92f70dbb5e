#pragma once

#include <span>
#include <vector>

#include "cpikan/domain_scaling.hpp"
#include "cpikan/networks.hpp"
#include "cpikan/pde_problems.hpp"

namespace cpikan {

/// Held-out evaluation points in physical coordinates (spatial axes, then
/// time), with the reference solution at each point.
struct TestGrid {
  int dim = 0;
  std::vector<double> coords;  // row-major, dim per point
  std::vector<double> truth;
  std::vector<int> shape;      // points per axis

  std::size_t size() const { return truth.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

/// Uniform tensor grid including the box edges: 256 x 100 (x, t) for the
/// time-dependent 1-D problems, 128 x 128 for Helmholtz, 256 nodes for the
/// steady 1-D problem.
std::vector<int> default_test_shape(const ProblemSpec& p);
TestGrid make_test_grid(const ProblemSpec& p, const FieldFn& truth,
                        std::vector<int> shape = {});

/// Network input for a physical point.
std::vector<double> network_input(const ScaledDomain& domain,
                                  std::span<const double> physical);

std::vector<double> predict(const Architecture& arch,
                            const NetworkParams& params,
                            const ScaledDomain& domain, const TestGrid& grid);

/// Source implied by the network for the steady reaction-diffusion operator,
/// D u_xx + kappa tanh(u), at every grid point.
std::vector<double> predict_source(const ProblemSpec& p,
                                   const Architecture& arch,
                                   const NetworkParams& params, double kappa,
                                   const ScaledDomain& domain,
                                   const TestGrid& grid);

}  // namespace cpikan
