#include "cpikan/autodiff.hpp"

#include <cassert>
#include <stdexcept>

namespace cpikan {

Var ScalarTape::variable(double value) {
  return record(value, -1, 0.0);
}

Var ScalarTape::record(double value, int p0, double w0, int p1, double w1) {
  nodes_.push_back(Node{{p0, p1}, {w0, w1}});
  return Var{this, static_cast<int>(nodes_.size()) - 1, value};
}

std::vector<double> ScalarTape::gradient(const Var& output) const {
  std::vector<double> adjoints;
  gradient_into(output, adjoints);
  return adjoints;
}

void ScalarTape::gradient_into(const Var& output,
                               std::vector<double>& adjoints) const {
  if (output.tape != this || output.index < 0) {
    throw std::invalid_argument("ScalarTape: output not recorded on this tape");
  }
  adjoints.assign(nodes_.size(), 0.0);
  adjoints[output.index] = 1.0;
  for (int i = output.index; i >= 0; --i) {
    const double a = adjoints[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.parent[0] >= 0) adjoints[n.parent[0]] += a * n.partial[0];
    if (n.parent[1] >= 0) adjoints[n.parent[1]] += a * n.partial[1];
  }
}

namespace {

ScalarTape* tape_of(const Var& a, [[maybe_unused]] const Var& b) {
  assert(a.tape != nullptr && a.tape == b.tape);
  return a.tape;
}

}  // namespace

Var operator+(const Var& a, const Var& b) {
  return tape_of(a, b)->record(a.value + b.value, a.index, 1.0, b.index, 1.0);
}

Var operator-(const Var& a, const Var& b) {
  return tape_of(a, b)->record(a.value - b.value, a.index, 1.0, b.index, -1.0);
}

Var operator*(const Var& a, const Var& b) {
  return tape_of(a, b)->record(a.value * b.value, a.index, b.value, b.index,
                               a.value);
}

Var operator/(const Var& a, const Var& b) {
  const double inv = 1.0 / b.value;
  return tape_of(a, b)->record(a.value * inv, a.index, inv, b.index,
                               -a.value * inv * inv);
}

Var operator-(const Var& a) { return a.tape->record(-a.value, a.index, -1.0); }

Var operator+(const Var& a, double b) {
  return a.tape->record(a.value + b, a.index, 1.0);
}
Var operator+(double a, const Var& b) { return b + a; }
Var operator-(const Var& a, double b) {
  return a.tape->record(a.value - b, a.index, 1.0);
}
Var operator-(double a, const Var& b) {
  return b.tape->record(a - b.value, b.index, -1.0);
}
Var operator*(const Var& a, double b) {
  return a.tape->record(a.value * b, a.index, b);
}
Var operator*(double a, const Var& b) { return b * a; }
Var operator/(const Var& a, double b) { return a * (1.0 / b); }
Var operator/(double a, const Var& b) {
  const double inv = 1.0 / b.value;
  return b.tape->record(a * inv, b.index, -a * inv * inv);
}

Var tanh(const Var& a) {
  const double s = std::tanh(a.value);
  return a.tape->record(s, a.index, 1.0 - s * s);
}

Var exp(const Var& a) {
  const double e = std::exp(a.value);
  return a.tape->record(e, a.index, e);
}

Var sin(const Var& a) {
  return a.tape->record(std::sin(a.value), a.index, std::cos(a.value));
}

Var cos(const Var& a) {
  return a.tape->record(std::cos(a.value), a.index, -std::sin(a.value));
}

}  // namespace cpikan
