#include "cpikan/chebyshev.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cpikan {

namespace {

double checked_input(double xi) {
  if (!std::isfinite(xi)) {
    throw std::domain_error("chebyshev: non-finite input");
  }
  if (std::abs(xi) > 1.0 + kChebyshevRangeTolerance) {
    throw std::domain_error("chebyshev: input " + std::to_string(xi) +
                            " outside [-1, 1]");
  }
  if (xi > 1.0) return 1.0;
  if (xi < -1.0) return -1.0;
  return xi;
}

}  // namespace

double eval_chebyshev_into(double xi, int degree, std::span<double> values,
                           std::span<double> d1, std::span<double> d2,
                           std::span<double> d3) {
  if (degree < 0) {
    throw std::invalid_argument("chebyshev: negative degree");
  }
  const double x = checked_input(xi);
  const bool third = !d3.empty();

  values[0] = 1.0;
  d1[0] = 0.0;
  d2[0] = 0.0;
  if (third) d3[0] = 0.0;
  if (degree == 0) return x;

  values[1] = x;
  d1[1] = 1.0;
  d2[1] = 0.0;
  if (third) d3[1] = 0.0;

  // T_n^(m) = 2m T_{n-1}^(m-1) + 2x T_{n-1}^(m) - T_{n-2}^(m)
  for (int n = 2; n <= degree; ++n) {
    values[n] = 2.0 * x * values[n - 1] - values[n - 2];
    d1[n] = 2.0 * values[n - 1] + 2.0 * x * d1[n - 1] - d1[n - 2];
    d2[n] = 4.0 * d1[n - 1] + 2.0 * x * d2[n - 1] - d2[n - 2];
    if (third) d3[n] = 6.0 * d2[n - 1] + 2.0 * x * d3[n - 1] - d3[n - 2];
  }
  return x;
}

ChebEval eval_chebyshev(double xi, int degree) {
  if (degree < 0) {
    throw std::invalid_argument("chebyshev: negative degree");
  }
  const auto size = static_cast<std::size_t>(degree) + 1;
  ChebEval out{std::vector<double>(size), std::vector<double>(size),
               std::vector<double>(size)};
  eval_chebyshev_into(xi, degree, out.values, out.d1, out.d2, {});
  return out;
}

}  // namespace cpikan
