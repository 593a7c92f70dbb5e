#pragma once

#include <span>
#include <vector>

namespace cpikan {

/// Chebyshev polynomials of the first kind T_0..T_k at one point, with their
/// first and second derivatives.
struct ChebEval {
  std::vector<double> values;
  std::vector<double> d1;
  std::vector<double> d2;
};

/// Largest tolerated excursion of |xi| beyond 1 before evaluation is refused.
inline constexpr double kChebyshevRangeTolerance = 1e-12;

/// Evaluates T_0..T_degree and their first two derivatives at `xi`.
///
/// Derivatives come from the differentiated three-term recurrence, so they
/// stay well defined at xi = +-1. Inputs within 1e-12 of the interval are
/// clamped; anything further out, or non-finite, throws std::domain_error.
ChebEval eval_chebyshev(double xi, int degree);

/// Allocation-free variant used by the network kernels. Each span must hold
/// degree + 1 entries; `d3` may be empty when the third derivative is not
/// needed. Returns the clamped input.
double eval_chebyshev_into(double xi, int degree, std::span<double> values,
                           std::span<double> d1, std::span<double> d2,
                           std::span<double> d3);

}  // namespace cpikan
