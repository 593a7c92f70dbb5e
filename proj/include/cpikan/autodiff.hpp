#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cpikan {

/// Maximum number of network input coordinates a jet tracks.
inline constexpr std::size_t kMaxInputs = 3;

/// Which derivative channels a jet carries.
enum class JetOrder { ValueOnly = 0, SecondOrder = 2 };

/// A value together with its first and diagonal second derivatives with
/// respect to each network input coordinate. Mixed partials are not carried.
template <class S>
struct BasicJet {
  S value{};
  std::array<S, kMaxInputs> d{};
  std::array<S, kMaxInputs> dd{};
  int dim = 0;
  JetOrder order = JetOrder::SecondOrder;
};

using Jet = BasicJet<double>;

/// Seeds the jet of input coordinate `axis`: value x, d/dx_axis = 1.
inline Jet input_jet(double x, std::size_t axis, int dim) {
  Jet j;
  j.value = x;
  j.d[axis] = 1.0;
  j.dim = dim;
  return j;
}

/// First to third derivatives of tanh at a point, reused by forward and
/// backward sweeps.
struct TanhDerivs {
  double s, g1, g2, g3;
};

inline TanhDerivs tanh_derivs(double z) {
  const double s = std::tanh(z);
  const double g1 = 1.0 - s * s;
  const double g2 = -2.0 * s * g1;
  const double g3 = -2.0 * g1 * g1 + 4.0 * s * s * g1;
  return {s, g1, g2, g3};
}

/// Chain rule of a scalar function through a jet, given f', f''.
inline Jet apply_scalar(const Jet& z, double f, double f1, double f2) {
  Jet y;
  y.value = f;
  y.dim = z.dim;
  y.order = z.order;
  if (z.order == JetOrder::SecondOrder) {
    for (int c = 0; c < z.dim; ++c) {
      y.d[c] = f1 * z.d[c];
      y.dd[c] = f2 * z.d[c] * z.d[c] + f1 * z.dd[c];
    }
  }
  return y;
}

inline Jet tanh(const Jet& z) {
  const TanhDerivs t = tanh_derivs(z.value);
  return apply_scalar(z, t.s, t.g1, t.g2);
}

class ScalarTape;

/// Handle to a node on a ScalarTape. Arithmetic on Vars records new nodes.
struct Var {
  ScalarTape* tape = nullptr;
  int index = -1;
  double value = 0.0;
};

/// Reverse-mode tape over scalar operations. Each node has at most two
/// parents; adjoints are propagated in reverse insertion order.
class ScalarTape {
 public:
  Var variable(double value);
  Var constant(double value) { return variable(value); }

  /// Records y = value with dy/d(parent_k) = partial_k.
  Var record(double value, int p0, double w0, int p1 = -1, double w1 = 0.0);

  /// Adjoints of `output` with respect to every node recorded so far.
  std::vector<double> gradient(const Var& output) const;

  /// Same as gradient() but reuses `adjoints` as scratch storage.
  void gradient_into(const Var& output, std::vector<double>& adjoints) const;

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    int parent[2];
    double partial[2];
  };
  std::vector<Node> nodes_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(const Var& a, double b);
Var operator*(double a, const Var& b);
Var operator/(const Var& a, double b);
Var operator/(double a, const Var& b);
Var tanh(const Var& a);
Var exp(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value; }

}  // namespace cpikan
