#include "cpikan/networks.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cpikan/chebyshev.hpp"

namespace cpikan {

namespace {

std::vector<int> shape_widths(int input_dim, int hidden_layers, int width,
                              int output_dim) {
  if (hidden_layers < 0) {
    throw std::invalid_argument("network: negative hidden layer count");
  }
  std::vector<int> w;
  w.push_back(input_dim);
  for (int l = 0; l < hidden_layers; ++l) w.push_back(width);
  w.push_back(output_dim);
  return w;
}

void check_widths(const std::vector<int>& widths, const char* what) {
  if (widths.size() < 2) {
    throw std::invalid_argument(std::string(what) +
                                ": need at least input and output widths");
  }
  for (int w : widths) {
    if (w < 1) {
      throw std::invalid_argument(std::string(what) + ": widths must be >= 1");
    }
  }
}

// Jet with zero value and derivatives, tagged with dimension and order.
Jet zero_jet(int dim, JetOrder order) {
  Jet j;
  j.dim = dim;
  j.order = order;
  return j;
}

// Reverse of y = tanh(h) at jet level: given adjoint of y, adjoint of h.
Jet tanh_backward(const Jet& h, const TanhDerivs& t, const Jet& yb) {
  Jet hb = zero_jet(h.dim, h.order);
  hb.value = yb.value * t.g1;
  if (h.order == JetOrder::SecondOrder) {
    for (int c = 0; c < h.dim; ++c) {
      const double hd = h.d[c];
      hb.value += yb.d[c] * t.g2 * hd + yb.dd[c] * (t.g3 * hd * hd + t.g2 * h.dd[c]);
      hb.d[c] = yb.d[c] * t.g1 + 2.0 * yb.dd[c] * t.g2 * hd;
      hb.dd[c] = yb.dd[c] * t.g1;
    }
  }
  return hb;
}

}  // namespace

// ---------------------------------------------------------------------------
// Architectures

CkanArchitecture CkanArchitecture::from_shape(int input_dim, int hidden_layers,
                                              int width, int degree,
                                              int output_dim) {
  CkanArchitecture a{shape_widths(input_dim, hidden_layers, width, output_dim),
                     degree};
  a.validate();
  return a;
}

void CkanArchitecture::validate() const {
  check_widths(widths, "ckan");
  if (degree < 1) throw std::invalid_argument("ckan: degree must be >= 1");
  if (widths.front() > static_cast<int>(kMaxInputs)) {
    throw std::invalid_argument("ckan: too many input coordinates");
  }
}

std::size_t CkanArchitecture::parameter_count() const {
  return layer_offset(layer_count());
}

std::size_t CkanArchitecture::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(widths[l]) * widths[l + 1] * (degree + 1);
  }
  return off;
}

std::size_t CkanArchitecture::coefficient_index(std::size_t layer,
                                                std::size_t i, std::size_t j,
                                                std::size_t n) const {
  return layer_offset(layer) +
         (i * widths[layer + 1] + j) * static_cast<std::size_t>(degree + 1) + n;
}

MlpArchitecture MlpArchitecture::from_shape(int input_dim, int hidden_layers,
                                            int width, int output_dim) {
  MlpArchitecture a{shape_widths(input_dim, hidden_layers, width, output_dim),
                    Activation::Tanh};
  a.validate();
  return a;
}

void MlpArchitecture::validate() const {
  check_widths(widths, "mlp");
  if (widths.front() > static_cast<int>(kMaxInputs)) {
    throw std::invalid_argument("mlp: too many input coordinates");
  }
}

std::size_t MlpArchitecture::parameter_count() const {
  return layer_offset(layer_count());
}

std::size_t MlpArchitecture::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(widths[l]) * widths[l + 1] + widths[l + 1];
  }
  return off;
}

std::size_t MlpArchitecture::weight_index(std::size_t layer, std::size_t out,
                                          std::size_t in) const {
  return layer_offset(layer) + out * widths[layer] + in;
}

std::size_t MlpArchitecture::bias_index(std::size_t layer,
                                        std::size_t out) const {
  return layer_offset(layer) +
         static_cast<std::size_t>(widths[layer]) * widths[layer + 1] + out;
}

std::size_t parameter_count(const Architecture& arch) {
  return std::visit([](const auto& a) { return a.parameter_count(); }, arch);
}

int input_dim(const Architecture& arch) {
  return std::visit([](const auto& a) { return a.widths.front(); }, arch);
}

int output_dim(const Architecture& arch) {
  return std::visit([](const auto& a) { return a.widths.back(); }, arch);
}

std::string describe(const Architecture& arch) {
  std::ostringstream os;
  const auto& widths =
      std::visit([](const auto& a) -> const std::vector<int>& { return a.widths; },
                 arch);
  os << (std::holds_alternative<CkanArchitecture>(arch) ? "ckan" : "mlp") << "[";
  for (std::size_t i = 0; i < widths.size(); ++i) {
    os << (i ? "," : "") << widths[i];
  }
  os << "]";
  if (const auto* c = std::get_if<CkanArchitecture>(&arch)) {
    os << " k=" << c->degree;
  }
  return os.str();
}

void validate_params(const Architecture& arch, const NetworkParams& params) {
  if (params.size() != parameter_count(arch)) {
    throw std::invalid_argument(
        "network: parameter vector has " + std::to_string(params.size()) +
        " entries, architecture needs " + std::to_string(parameter_count(arch)));
  }
  for (double v : params.flat) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("network: non-finite parameter");
    }
  }
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x6b616eu};
  std::mt19937_64 rng(seq);
  NetworkParams p;
  p.flat.assign(parameter_count(arch), 0.0);

  if (const auto* c = std::get_if<CkanArchitecture>(&arch)) {
    for (std::size_t l = 0; l < c->layer_count(); ++l) {
      const double stddev = 1.0 / (c->widths[l] * (c->degree + 1.0));
      std::normal_distribution<double> dist(0.0, stddev);
      const std::size_t begin = c->layer_offset(l);
      const std::size_t end = c->layer_offset(l + 1);
      for (std::size_t k = begin; k < end; ++k) p.flat[k] = dist(rng);
    }
  } else {
    const auto& m = std::get<MlpArchitecture>(arch);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      const double fan_in = m.widths[l];
      const double fan_out = m.widths[l + 1];
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (int o = 0; o < m.widths[l + 1]; ++o) {
        for (int i = 0; i < m.widths[l]; ++i) {
          p.flat[m.weight_index(l, o, i)] = dist(rng);
        }
      }
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Tape

PointTape::PointTape(const Architecture& arch) : arch_(arch) {
  std::visit([](const auto& a) { a.validate(); }, arch_);
  const auto& widths =
      std::visit([](const auto& a) -> const std::vector<int>& { return a.widths; },
                 arch_);
  const auto* ckan = std::get_if<CkanArchitecture>(&arch_);
  layers_.resize(widths.size() - 1);
  int max_width = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::size_t n_in = widths[l];
    const std::size_t n_out = widths[l + 1];
    max_width = std::max({max_width, widths[l], widths[l + 1]});
    LayerTrace& t = layers_[l];
    t.input.resize(n_in);
    if (ckan) {
      const std::size_t K = ckan->degree + 1;
      t.activated.resize(n_in);
      t.tanh.resize(n_in);
      t.cheb.resize(n_in * 4 * K);
      t.phi1.resize(n_in * n_out);
      t.phi2.resize(n_in * n_out);
    } else {
      t.pre.resize(n_out);
      t.activated.resize(n_out);
      t.tanh.resize(n_out);
    }
  }
  output_.resize(widths.back());
  adj_a_.resize(max_width);
  adj_b_.resize(max_width);
}

std::span<const Jet> PointTape::record(std::span<const double> params,
                                       std::span<const double> input,
                                       JetOrder order) {
  const int n0 = input_dim(arch_);
  if (static_cast<int>(input.size()) != n0) {
    throw std::invalid_argument("network: input has " +
                                std::to_string(input.size()) +
                                " coordinates, expected " + std::to_string(n0));
  }
  if (params.size() != parameter_count(arch_)) {
    throw std::invalid_argument("network: parameter vector size mismatch");
  }
  params_ = params;
  order_ = order;
  dim_ = n0;
  auto& first = layers_.front().input;
  for (int c = 0; c < n0; ++c) {
    first[c] = input_jet(input[c], c, n0);
    first[c].order = order;
    if (order == JetOrder::ValueOnly) first[c].d[c] = 0.0;
  }
  if (const auto* c = std::get_if<CkanArchitecture>(&arch_)) {
    forward_ckan(*c, params);
  } else {
    forward_mlp(std::get<MlpArchitecture>(arch_), params);
  }
  return output_;
}

void PointTape::forward_ckan(const CkanArchitecture& a,
                             std::span<const double> params) {
  const std::size_t K = a.degree + 1;
  const bool second = order_ == JetOrder::SecondOrder;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    LayerTrace& t = layers_[l];
    const std::size_t n_in = a.widths[l];
    const std::size_t n_out = a.widths[l + 1];
    std::vector<Jet>& out =
        (l + 1 < layers_.size()) ? layers_[l + 1].input : output_;
    for (std::size_t j = 0; j < n_out; ++j) out[j] = zero_jet(dim_, order_);

    const double* coef = params.data() + a.layer_offset(l);
    for (std::size_t i = 0; i < n_in; ++i) {
      t.tanh[i] = tanh_derivs(t.input[i].value);
      const TanhDerivs& td = t.tanh[i];
      t.activated[i] = apply_scalar(t.input[i], td.s, td.g1, td.g2);
      const Jet& xi = t.activated[i];
      double* T = t.cheb.data() + i * 4 * K;
      std::span<double> T0(T, K), T1(T + K, K), T2(T + 2 * K, K),
          T3(T + 3 * K, K);
      if (second) {
        eval_chebyshev_into(xi.value, a.degree, T0, T1, T2, T3);
      } else {
        eval_chebyshev_into(xi.value, a.degree, T0, T1, T2, {});
      }

      for (std::size_t j = 0; j < n_out; ++j) {
        const double* c = coef + (i * n_out + j) * K;
        double phi = 0.0, phi1 = 0.0, phi2 = 0.0;
        for (std::size_t n = 0; n < K; ++n) {
          phi += c[n] * T0[n];
          phi1 += c[n] * T1[n];
          phi2 += c[n] * T2[n];
        }
        t.phi1[i * n_out + j] = phi1;
        t.phi2[i * n_out + j] = phi2;
        Jet& o = out[j];
        o.value += phi;
        if (second) {
          for (int ch = 0; ch < dim_; ++ch) {
            o.d[ch] += phi1 * xi.d[ch];
            o.dd[ch] += phi2 * xi.d[ch] * xi.d[ch] + phi1 * xi.dd[ch];
          }
        }
      }
    }
  }
}

void PointTape::forward_mlp(const MlpArchitecture& a,
                            std::span<const double> params) {
  const bool second = order_ == JetOrder::SecondOrder;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    LayerTrace& t = layers_[l];
    const std::size_t n_in = a.widths[l];
    const std::size_t n_out = a.widths[l + 1];
    const bool last = l + 1 == layers_.size();
    const double* W = params.data() + a.layer_offset(l);
    const double* b = W + n_in * n_out;
    for (std::size_t j = 0; j < n_out; ++j) {
      Jet z = zero_jet(dim_, order_);
      z.value = b[j];
      const double* row = W + j * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const Jet& h = t.input[i];
        z.value += row[i] * h.value;
        if (second) {
          for (int ch = 0; ch < dim_; ++ch) {
            z.d[ch] += row[i] * h.d[ch];
            z.dd[ch] += row[i] * h.dd[ch];
          }
        }
      }
      t.pre[j] = z;
      if (last) {
        output_[j] = z;
      } else {
        t.tanh[j] = tanh_derivs(z.value);
        const TanhDerivs& td = t.tanh[j];
        layers_[l + 1].input[j] = apply_scalar(z, td.s, td.g1, td.g2);
      }
    }
  }
}

void PointTape::backward(std::span<const Jet> out_adjoint,
                         std::span<double> grad) {
  if (out_adjoint.size() != output_.size()) {
    throw std::invalid_argument("tape: adjoint size mismatch");
  }
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("tape: gradient size mismatch");
  }
  std::copy(out_adjoint.begin(), out_adjoint.end(), adj_a_.begin());
  if (const auto* c = std::get_if<CkanArchitecture>(&arch_)) {
    backward_ckan(*c, grad);
  } else {
    backward_mlp(std::get<MlpArchitecture>(arch_), grad);
  }
}

void PointTape::backward_ckan(const CkanArchitecture& a,
                              std::span<double> grad) {
  const std::size_t K = a.degree + 1;
  const bool second = order_ == JetOrder::SecondOrder;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerTrace& t = layers_[l];
    const std::size_t n_in = a.widths[l];
    const std::size_t n_out = a.widths[l + 1];
    const std::size_t off = a.layer_offset(l);
    const double* coef = params_.data() + off;
    double* g = grad.data() + off;
    const std::vector<Jet>& ob = adj_a_;

    for (std::size_t i = 0; i < n_in; ++i) {
      const Jet& xi = t.activated[i];
      const double* T = t.cheb.data() + i * 4 * K;
      const double* T1 = T + K;
      const double* T2 = T + 2 * K;
      const double* T3 = T + 3 * K;
      Jet xb = zero_jet(dim_, order_);

      for (std::size_t j = 0; j < n_out; ++j) {
        const Jet& o = ob[j];
        const double a0 = o.value;
        double a1 = 0.0, a2 = 0.0;
        if (second) {
          for (int ch = 0; ch < dim_; ++ch) {
            a1 += o.d[ch] * xi.d[ch] + o.dd[ch] * xi.dd[ch];
            a2 += o.dd[ch] * xi.d[ch] * xi.d[ch];
          }
        }
        const double* c = coef + (i * n_out + j) * K;
        double* gc = g + (i * n_out + j) * K;
        const double phi1 = t.phi1[i * n_out + j];
        if (second) {
          const double phi2 = t.phi2[i * n_out + j];
          double phi3 = 0.0;
          for (std::size_t n = 0; n < K; ++n) {
            gc[n] += a0 * T[n] + a1 * T1[n] + a2 * T2[n];
            phi3 += c[n] * T3[n];
          }
          xb.value += a0 * phi1 + a1 * phi2 + a2 * phi3;
          for (int ch = 0; ch < dim_; ++ch) {
            xb.d[ch] += o.d[ch] * phi1 + 2.0 * o.dd[ch] * phi2 * xi.d[ch];
            xb.dd[ch] += o.dd[ch] * phi1;
          }
        } else {
          for (std::size_t n = 0; n < K; ++n) gc[n] += a0 * T[n];
          xb.value += a0 * phi1;
        }
      }
      if (l > 0) adj_b_[i] = tanh_backward(t.input[i], t.tanh[i], xb);
    }
    std::swap(adj_a_, adj_b_);
  }
}

void PointTape::backward_mlp(const MlpArchitecture& a, std::span<double> grad) {
  const bool second = order_ == JetOrder::SecondOrder;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerTrace& t = layers_[l];
    const std::size_t n_in = a.widths[l];
    const std::size_t n_out = a.widths[l + 1];
    const bool last = l + 1 == layers_.size();
    const std::size_t off = a.layer_offset(l);
    const double* W = params_.data() + off;
    double* gW = grad.data() + off;
    double* gb = gW + n_in * n_out;

    // adj_a_ holds adjoints of this layer's output; turn them into adjoints
    // of the pre-activation in place.
    if (!last) {
      for (std::size_t j = 0; j < n_out; ++j) {
        adj_a_[j] = tanh_backward(t.pre[j], t.tanh[j], adj_a_[j]);
      }
    }
    if (l > 0) {
      for (std::size_t i = 0; i < n_in; ++i) adj_b_[i] = zero_jet(dim_, order_);
    }
    for (std::size_t j = 0; j < n_out; ++j) {
      const Jet& zb = adj_a_[j];
      gb[j] += zb.value;
      const double* row = W + j * n_in;
      double* grow = gW + j * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const Jet& h = t.input[i];
        double gw = zb.value * h.value;
        if (second) {
          for (int ch = 0; ch < dim_; ++ch) {
            gw += zb.d[ch] * h.d[ch] + zb.dd[ch] * h.dd[ch];
          }
        }
        grow[i] += gw;
        if (l > 0) {
          Jet& hb = adj_b_[i];
          hb.value += row[i] * zb.value;
          if (second) {
            for (int ch = 0; ch < dim_; ++ch) {
              hb.d[ch] += row[i] * zb.d[ch];
              hb.dd[ch] += row[i] * zb.dd[ch];
            }
          }
        }
      }
    }
    std::swap(adj_a_, adj_b_);
  }
}

// ---------------------------------------------------------------------------

std::vector<double> forward(const Architecture& arch,
                            const NetworkParams& params,
                            std::span<const double> input) {
  PointTape tape(arch);
  auto out = tape.record(params.flat, input, JetOrder::ValueOnly);
  std::vector<double> values;
  values.reserve(out.size());
  for (const Jet& j : out) values.push_back(j.value);
  return values;
}

std::vector<Jet> forward_jet(const Architecture& arch,
                             const NetworkParams& params,
                             std::span<const double> input) {
  PointTape tape(arch);
  auto out = tape.record(params.flat, input, JetOrder::SecondOrder);
  return {out.begin(), out.end()};
}

}  // namespace cpikan
