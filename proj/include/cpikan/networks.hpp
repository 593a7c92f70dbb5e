#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cpikan/autodiff.hpp"

namespace cpikan {

/// Chebyshev KAN: every edge (i -> j) of layer l carries
/// phi(xi) = sum_n c[l][i][j][n] T_n(xi), and tanh is applied to the input of
/// every layer (including the raw network input) but not to the final output.
struct CkanArchitecture {
  std::vector<int> widths;  // [n_0, ..., n_L]
  int degree = 1;

  /// widths = [input_dim, width x hidden_layers, output_dim]
  static CkanArchitecture from_shape(int input_dim, int hidden_layers,
                                     int width, int degree, int output_dim = 1);

  void validate() const;
  std::size_t layer_count() const { return widths.size() - 1; }
  std::size_t parameter_count() const;
  std::size_t layer_offset(std::size_t layer) const;
  std::size_t coefficient_index(std::size_t layer, std::size_t i,
                                std::size_t j, std::size_t n) const;
};

enum class Activation { Tanh };

/// Fully connected tanh network; every layer, including the output layer,
/// carries a bias. The output layer is affine.
struct MlpArchitecture {
  std::vector<int> widths;
  Activation activation = Activation::Tanh;

  static MlpArchitecture from_shape(int input_dim, int hidden_layers, int width,
                                    int output_dim = 1);

  void validate() const;
  std::size_t layer_count() const { return widths.size() - 1; }
  std::size_t parameter_count() const;
  std::size_t layer_offset(std::size_t layer) const;
  /// Row-major W^(l)[out][in], followed by b^(l)[out].
  std::size_t weight_index(std::size_t layer, std::size_t out,
                           std::size_t in) const;
  std::size_t bias_index(std::size_t layer, std::size_t out) const;
};

using Architecture = std::variant<CkanArchitecture, MlpArchitecture>;

/// Flat trainable parameter vector; positions are given by the owning
/// architecture's index functions.
struct NetworkParams {
  std::vector<double> flat;

  std::size_t size() const { return flat.size(); }
  std::span<const double> view() const { return flat; }
};

std::size_t parameter_count(const Architecture& arch);
int input_dim(const Architecture& arch);
int output_dim(const Architecture& arch);
std::string describe(const Architecture& arch);

/// Throws std::invalid_argument unless params matches arch and is finite.
void validate_params(const Architecture& arch, const NetworkParams& params);

/// cKAN coefficients ~ N(0, (1 / (n_l (k + 1)))^2); MLP weights Glorot
/// uniform, biases zero. Deterministic in `seed`.
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

/// Per-point record of a network forward pass over jets. Holds everything
/// the reverse sweep needs; buffers are reused across points.
class PointTape {
 public:
  PointTape() = default;
  explicit PointTape(const Architecture& arch);

  /// Forward sweep at one input point. Returns the output jets.
  std::span<const Jet> record(std::span<const double> params,
                              std::span<const double> input, JetOrder order);

  /// Reverse sweep: accumulates d(sum_j <out_adjoint_j, out_j>)/d(params)
  /// into `grad`. Adjoint jets share the layout of the recorded outputs.
  void backward(std::span<const Jet> out_adjoint, std::span<double> grad);

  const Architecture& architecture() const { return arch_; }

 private:
  struct LayerTrace {
    std::vector<Jet> input;      // h
    std::vector<Jet> activated;  // tanh(h) for cKAN, tanh(z) for hidden MLP
    std::vector<TanhDerivs> tanh;
    std::vector<double> cheb;    // T, T', T'', T''' blocks per input node
    std::vector<double> phi1;    // phi' per edge
    std::vector<double> phi2;    // phi'' per edge
    std::vector<Jet> pre;        // MLP pre-activation z
  };

  void forward_ckan(const CkanArchitecture& a, std::span<const double> params);
  void forward_mlp(const MlpArchitecture& a, std::span<const double> params);
  void backward_ckan(const CkanArchitecture& a, std::span<double> grad);
  void backward_mlp(const MlpArchitecture& a, std::span<double> grad);

  Architecture arch_;
  std::span<const double> params_;
  JetOrder order_ = JetOrder::SecondOrder;
  int dim_ = 0;
  std::vector<LayerTrace> layers_;
  std::vector<Jet> output_;
  std::vector<Jet> adj_a_, adj_b_;
};

/// Network output at one input point.
std::vector<double> forward(const Architecture& arch,
                            const NetworkParams& params,
                            std::span<const double> input);

/// Network output jets at one input point: exact first and diagonal second
/// derivatives with respect to every input coordinate.
std::vector<Jet> forward_jet(const Architecture& arch,
                             const NetworkParams& params,
                             std::span<const double> input);

}  // namespace cpikan
