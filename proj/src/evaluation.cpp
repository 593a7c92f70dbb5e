#include "cpikan/evaluation.hpp"

#include <stdexcept>

namespace cpikan {

std::vector<int> default_test_shape(const ProblemSpec& p) {
  if (p.kind == ProblemKind::Helmholtz2D) return {128, 128};
  if (p.time_dependent()) return {256, 100};
  return {256};
}

TestGrid make_test_grid(const ProblemSpec& p, const FieldFn& truth,
                        std::vector<int> shape) {
  if (shape.empty()) shape = default_test_shape(p);
  const int dim = p.input_dim();
  if (static_cast<int>(shape.size()) != dim) {
    throw std::invalid_argument("test grid: shape has wrong rank");
  }
  for (int n : shape) {
    if (n < 2) throw std::invalid_argument("test grid: need >= 2 nodes per axis");
  }
  FieldFn field = truth;
  if (!field) {
    if (p.kind == ProblemKind::AllenCahn) {
      throw std::invalid_argument("test grid: allen_cahn needs a reference field");
    }
    field = [&p](std::span<const double> x, double t) {
      return *exact_solution(p, x, t);
    };
  }

  std::vector<std::vector<double>> axes(dim);
  for (int a = 0; a < dim; ++a) {
    const bool is_time = p.time_dependent() && a == p.spatial_dim();
    const double lo = is_time ? 0.0 : -p.half_widths[a];
    const double hi = is_time ? p.final_time : p.half_widths[a];
    for (int i = 0; i < shape[a]; ++i) {
      axes[a].push_back(i + 1 == shape[a] ? hi
                                          : lo + (hi - lo) * i / (shape[a] - 1));
    }
  }

  TestGrid g;
  g.dim = dim;
  g.shape = shape;
  std::size_t total = 1;
  for (int n : shape) total *= static_cast<std::size_t>(n);
  g.coords.reserve(total * dim);
  g.truth.reserve(total);
  std::vector<int> idx(dim, 0);
  std::vector<double> pt(dim);
  const int sdim = p.spatial_dim();
  for (std::size_t k = 0; k < total; ++k) {
    for (int a = 0; a < dim; ++a) pt[a] = axes[a][idx[a]];
    g.coords.insert(g.coords.end(), pt.begin(), pt.end());
    const double t = p.time_dependent() ? pt[sdim] : 0.0;
    g.truth.push_back(field(std::span<const double>(pt.data(), sdim), t));
    // last axis varies fastest
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return g;
}

std::vector<double> network_input(const ScaledDomain& domain,
                                  std::span<const double> physical) {
  std::vector<double> in(physical.begin(), physical.end());
  for (std::size_t a = 0; a < domain.spatial_dim(); ++a) {
    in[a] = domain.axis_to_reference(a, physical[a]);
  }
  return in;
}

std::vector<double> predict(const Architecture& arch,
                            const NetworkParams& params,
                            const ScaledDomain& domain, const TestGrid& grid) {
  PointTape tape(arch);
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto in = network_input(domain, grid.point(i));
    out.push_back(tape.record(params.view(), in, JetOrder::ValueOnly)[0].value);
  }
  return out;
}

std::vector<double> predict_source(const ProblemSpec& p,
                                   const Architecture& arch,
                                   const NetworkParams& params, double kappa,
                                   const ScaledDomain& domain,
                                   const TestGrid& grid) {
  if (p.kind != ProblemKind::ReactionDiffusion) {
    throw std::invalid_argument("predict_source: reaction_diffusion only");
  }
  PointTape tape(arch);
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto in = network_input(domain, grid.point(i));
    const Jet u = tape.record(params.view(), in, JetOrder::SecondOrder)[0];
    out.push_back(residual(p, domain, u, kappa, 0.0));
  }
  return out;
}

}  // namespace cpikan
