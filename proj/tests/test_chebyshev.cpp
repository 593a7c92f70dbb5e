#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cpikan/chebyshev.hpp"
#include "doctest.h"

using namespace cpikan;

namespace {

// Trigonometric definition, independent of the recurrence.
double cheb_trig(int n, double x) { return std::cos(n * std::acos(x)); }

}  // namespace

TEST_CASE("chebyshev values follow the closed form") {
  CHECK(eval_chebyshev(0.3, 0).values.size() == 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = u(rng);
    const ChebEval e = eval_chebyshev(x, 12);
    REQUIRE(e.values.size() == 13);
    for (int n = 0; n <= 12; ++n) {
      CHECK(e.values[n] == doctest::Approx(cheb_trig(n, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("small degrees match explicit polynomials") {
  const double x = 0.37;
  const ChebEval e = eval_chebyshev(x, 4);
  CHECK(e.values[2] == doctest::Approx(2 * x * x - 1));
  CHECK(e.values[3] == doctest::Approx(4 * x * x * x - 3 * x));
  CHECK(e.values[4] == doctest::Approx(8 * std::pow(x, 4) - 8 * x * x + 1));
  CHECK(e.d1[3] == doctest::Approx(12 * x * x - 3));
  CHECK(e.d2[3] == doctest::Approx(24 * x));
  CHECK(e.d2[4] == doctest::Approx(96 * x * x - 16));
}

TEST_CASE("derivatives at the end points") {
  // T_n'(1) = n^2, T_n''(1) = n^2 (n^2 - 1) / 3, with parity at -1.
  for (double x : {1.0, -1.0}) {
    const ChebEval e = eval_chebyshev(x, 9);
    for (int n = 0; n <= 9; ++n) {
      const double sign1 = (x < 0 && n % 2 == 0) ? -1.0 : 1.0;
      const double sign2 = (x < 0 && n % 2 == 1) ? -1.0 : 1.0;
      CHECK(e.d1[n] == doctest::Approx(sign1 * n * n));
      CHECK(e.d2[n] == doctest::Approx(sign2 * n * n * (n * n - 1) / 3.0));
    }
  }
}

TEST_CASE("derivatives agree with central differences") {
  const double h = 1e-5;
  for (double x : {-0.9, -0.31, 0.0, 0.42, 0.87}) {
    const ChebEval e = eval_chebyshev(x, 8);
    const ChebEval p = eval_chebyshev(x + h, 8);
    const ChebEval m = eval_chebyshev(x - h, 8);
    for (int n = 0; n <= 8; ++n) {
      const double fd1 = (p.values[n] - m.values[n]) / (2 * h);
      const double fd2 = (p.d1[n] - m.d1[n]) / (2 * h);
      CHECK(e.d1[n] == doctest::Approx(fd1).epsilon(1e-7).scale(1.0));
      CHECK(e.d2[n] == doctest::Approx(fd2).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("third derivative from the allocation-free kernel") {
  const int k = 6;
  std::vector<double> v(k + 1), d1(k + 1), d2(k + 1), d3(k + 1);
  const double x = 0.23, h = 1e-5;
  eval_chebyshev_into(x, k, v, d1, d2, d3);
  const ChebEval p = eval_chebyshev(x + h, k);
  const ChebEval m = eval_chebyshev(x - h, k);
  for (int n = 0; n <= k; ++n) {
    CHECK(d3[n] == doctest::Approx((p.d2[n] - m.d2[n]) / (2 * h)).epsilon(1e-6));
  }
  // T_3''' = 24, T_4''' = 192 x
  CHECK(d3[3] == doctest::Approx(24.0));
  CHECK(d3[4] == doctest::Approx(192.0 * x));
}

TEST_CASE("range handling") {
  CHECK_NOTHROW(eval_chebyshev(1.0 + 5e-13, 3));
  CHECK(eval_chebyshev(1.0 + 5e-13, 3).values[3] == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_chebyshev(1.0 + 1e-9, 3), std::domain_error);
  CHECK_THROWS_AS(eval_chebyshev(-1.5, 3), std::domain_error);
  CHECK_THROWS_AS(eval_chebyshev(std::numeric_limits<double>::quiet_NaN(), 3),
                  std::domain_error);
  CHECK_THROWS_AS(eval_chebyshev(std::numeric_limits<double>::infinity(), 3),
                  std::domain_error);
  CHECK_THROWS_AS(eval_chebyshev(0.0, -1), std::invalid_argument);
}

TEST_CASE("bounded by one on the interval") {
  for (int i = 0; i <= 100; ++i) {
    const double x = -1.0 + 2.0 * i / 100.0;
    for (double v : eval_chebyshev(x, 20).values) CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}
