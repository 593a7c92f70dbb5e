#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cpikan/physics_loss.hpp"
#include "doctest.h"

using namespace cpikan;

namespace {

constexpr double kPi = std::numbers::pi;

// The exact diffusion solution expressed in network coordinates.
JetField diffusion_truth(double D, double scale) {
  return [=](std::span<const double> in) {
    const double x = scale * in[0], t = in[1];
    const double e = std::exp(-kPi * kPi * D * t);
    Jet j;
    j.dim = 2;
    j.value = std::sin(kPi * x) * e;
    j.d[0] = scale * kPi * std::cos(kPi * x) * e;
    j.dd[0] = -scale * scale * kPi * kPi * std::sin(kPi * x) * e;
    j.d[1] = -kPi * kPi * D * j.value;
    return j;
  };
}

JetField network_field(const Architecture& a, const NetworkParams& p) {
  return [a, p](std::span<const double> in) { return forward_jet(a, p, in)[0]; };
}

PointSet shuffled(const PointSet& s, std::mt19937_64& rng) {
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  PointSet out;
  out.dim = s.dim;
  for (std::size_t i : order) out.push(s.point(i), s.targets[i]);
  return out;
}

}  // namespace

TEST_CASE("exact solution gives zero loss") {
  const ProblemSpec p = ProblemSpec::diffusion(2.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({2.0}, 1.0);
  const TrainingSet s = sample_training_set(p, d, {500, 100, 100, 0}, 1);
  const LossBreakdown b =
      compute_loss(diffusion_truth(0.1, 2.0), 0.0, {&p, &d, &s, {0.01, 1, 1, 1, 0}});
  CHECK(b.res < 1e-16);
  CHECK(b.init < 1e-16);
  CHECK(b.bc < 1e-16);
  CHECK(b.total < 1e-16);
}

TEST_CASE("all-zero weights give zero total") {
  const ProblemSpec p = ProblemSpec::diffusion(2.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({2.0}, 1.0);
  const TrainingSet s = sample_training_set(p, d, {50, 10, 10, 0}, 1);
  const Architecture a = CkanArchitecture::from_shape(2, 1, 4, 3);
  LossEvaluator ev(a, {&p, &d, &s, {0, 0, 0, 0, 0}});
  CHECK(ev.loss(init_params(a, 1).view(), 0.0).total == 0.0);
  CHECK(ev.loss(init_params(a, 2).view(), 0.0).total == 0.0);
}

TEST_CASE("hand-computed residual mean") {
  const ProblemSpec p = ProblemSpec::diffusion(1.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({1.0}, 1.0);
  TrainingSet s;
  s.residual.dim = s.initial.dim = s.boundary.dim = s.measurement.dim = 2;
  // zero field: residual = -f
  const double pts[3][2] = {{0.1, 0.2}, {-0.5, 0.7}, {0.9, 0.1}};
  for (int i = 0; i < 3; ++i) s.residual.push(pts[i], -(i + 1.0));
  const JetField zero = [](std::span<const double>) {
    Jet j;
    j.dim = 2;
    return j;
  };
  const LossBreakdown b = compute_loss(zero, 0.0, {&p, &d, &s, {0.01, 0, 0, 0, 0}});
  CHECK(b.res == doctest::Approx(14.0 / 3.0));
  CHECK(b.total == doctest::Approx(0.01 * 14.0 / 3.0));
}

TEST_CASE("evaluator agrees with the generic loss on a network") {
  for (bool kan : {true, false}) {
    const ProblemSpec p = ProblemSpec::helmholtz(4.0, 2.0, 0.25, 1.0, 1.0);
    const ScaledDomain d = ScaledDomain::scaled({4.0, 2.0}, 0.0);
    const TrainingSet s = sample_training_set(p, d, {60, 0, 40, 0}, 2);
    const Architecture a = kan ? Architecture(CkanArchitecture::from_shape(2, 2, 5, 3))
                               : Architecture(MlpArchitecture::from_shape(2, 2, 8));
    const NetworkParams params = init_params(a, 3);
    const LossProblem lp{&p, &d, &s, {0.5, 0.5, 0, 1, 0}};
    LossEvaluator ev(a, lp);
    const LossBreakdown x = ev.loss(params.view(), 1.0);
    const LossBreakdown y = compute_loss(network_field(a, params), 1.0, lp);
    CHECK(x.res == doctest::Approx(y.res).epsilon(1e-13));
    CHECK(x.bc == doctest::Approx(y.bc).epsilon(1e-13));
    CHECK(x.total == doctest::Approx(0.5 * y.res + 0.5 * y.bc).epsilon(1e-13));
  }
}

TEST_CASE("total follows the nested weighting") {
  const ProblemSpec p = ProblemSpec::allen_cahn(2.0, 1e-4);
  const ScaledDomain d = ScaledDomain::scaled({2.0}, 1.0);
  const TrainingSet s = sample_training_set(
      p, d, {40, 20, 20, 20}, 5, {},
      [](std::span<const double> x, double t) { return std::cos(x[0]) * t; });
  const Architecture a = CkanArchitecture::from_shape(2, 1, 4, 2);
  const LossWeights w{0.3, 0.7, 1.5, 2.0, 0.25};
  LossEvaluator ev(a, {&p, &d, &s, w});
  const LossBreakdown b = ev.loss(init_params(a, 1).view(), 0.0);
  CHECK(b.res >= 0.0);
  CHECK(b.meas > 0.0);
  CHECK(b.total == doctest::Approx(0.3 * b.res + 0.7 * (1.5 * b.init + 2.0 * b.bc +
                                                      0.25 * b.meas)).epsilon(1e-15));

  LossWeights w2 = w;
  w2.res *= 2.0;
  LossEvaluator ev2(a, {&p, &d, &s, w2});
  const LossBreakdown b2 = ev2.loss(init_params(a, 1).view(), 0.0);
  CHECK(b2.total - b.total == doctest::Approx(0.3 * b.res).epsilon(1e-12));
}

TEST_CASE("point order does not change the components") {
  const ProblemSpec p = ProblemSpec::diffusion(4.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({4.0}, 1.0);
  const TrainingSet s = sample_training_set(p, d, {200, 50, 50, 0}, 8);
  std::mt19937_64 rng(1);
  TrainingSet t = s;
  t.residual = shuffled(s.residual, rng);
  t.initial = shuffled(s.initial, rng);
  t.boundary = shuffled(s.boundary, rng);
  const Architecture a = MlpArchitecture::from_shape(2, 2, 6);
  const NetworkParams params = init_params(a, 2);
  LossEvaluator e1(a, {&p, &d, &s, {0.01, 1, 1, 1, 0}});
  LossEvaluator e2(a, {&p, &d, &t, {0.01, 1, 1, 1, 0}});
  const LossBreakdown x = e1.loss(params.view(), 0.0);
  const LossBreakdown y = e2.loss(params.view(), 0.0);
  CHECK(std::abs(x.res - y.res) <= 1e-12);
  CHECK(std::abs(x.init - y.init) <= 1e-12);
  CHECK(std::abs(x.bc - y.bc) <= 1e-12);
}

TEST_CASE("M = 1 scaling reproduces the unscaled loss exactly") {
  const ProblemSpec p = ProblemSpec::diffusion(1.0, 0.1);
  const ScaledDomain sd = ScaledDomain::scaled({1.0}, 1.0);
  const ScaledDomain ud = ScaledDomain::unscaled({1.0}, 1.0);
  const TrainingSet s = sample_training_set(p, ud, {100, 30, 30, 0}, 4);
  const Architecture a = CkanArchitecture::from_shape(2, 2, 4, 4);
  const NetworkParams params = init_params(a, 6);
  LossEvaluator e1(a, {&p, &sd, &s, {0.01, 1, 1, 1, 0}});
  LossEvaluator e2(a, {&p, &ud, &s, {0.01, 1, 1, 1, 0}});
  CHECK(e1.loss(params.view(), 0.0).total == e2.loss(params.view(), 0.0).total);
}

TEST_CASE("gradient matches finite differences, including kappa") {
  const ProblemSpec p = ProblemSpec::reaction_diffusion(6.0, 0.01, 0.7, true);
  const ScaledDomain d = ScaledDomain::scaled({6.0}, 0.0);
  const TrainingSet s = sample_training_set(p, d, {40, 0, 2, 8}, 3, {0.05, 0.05});
  for (bool kan : {true, false}) {
    const Architecture a = kan ? Architecture(CkanArchitecture::from_shape(1, 2, 4, 5))
                               : Architecture(MlpArchitecture::from_shape(1, 2, 6));
    const NetworkParams params = init_params(a, 12);
    LossEvaluator ev(a, {&p, &d, &s, {1, 1, 0, 1, 1}});
    REQUIRE(ev.gradient_size() == params.size() + 1);
    std::vector<double> g(ev.gradient_size());
    const double kappa = 0.4;
    ev.loss_and_gradient(params.view(), kappa, g);
    const double h = 1e-6;
    for (std::size_t i = 0; i < params.size(); i += 5) {
      NetworkParams hi = params, lo = params;
      hi.flat[i] += h;
      lo.flat[i] -= h;
      const double fd =
          (ev.loss(hi.view(), kappa).total - ev.loss(lo.view(), kappa).total) / (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-4));
    }
    const double fdk = (ev.loss(params.view(), kappa + h).total -
                        ev.loss(params.view(), kappa - h).total) / (2 * h);
    CHECK(g.back() == doctest::Approx(fdk).epsilon(1e-6));
  }
}

TEST_CASE("threaded evaluation") {
  const ProblemSpec p = ProblemSpec::diffusion(2.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({2.0}, 1.0);
  const TrainingSet s = sample_training_set(p, d, {300, 60, 60, 0}, 2);
  const Architecture a = CkanArchitecture::from_shape(2, 2, 5, 3);
  const NetworkParams params = init_params(a, 1);
  const LossProblem lp{&p, &d, &s, {0.01, 1, 1, 1, 0}};
  LossEvaluator serial(a, lp);
  LossEvaluator det(a, lp, {3, true});
  LossEvaluator dyn(a, lp, {3, false});
  std::vector<double> g0(serial.gradient_size()), g1(g0.size()), g2(g0.size()),
      g3(g0.size());
  const double t0 = serial.loss_and_gradient(params.view(), 0, g0).total;
  const double t1 = det.loss_and_gradient(params.view(), 0, g1).total;
  const double t2 = det.loss_and_gradient(params.view(), 0, g2).total;
  const double t3 = dyn.loss_and_gradient(params.view(), 0, g3).total;
  CHECK(t1 == t2);
  CHECK(g1 == g2);
  CHECK(std::abs(t0 - t1) < 1e-12);
  CHECK(std::abs(t0 - t3) < 1e-12);
  for (std::size_t i = 0; i < g0.size(); ++i) CHECK(std::abs(g0[i] - g3[i]) < 1e-12);
}

TEST_CASE("validation") {
  const ProblemSpec p = ProblemSpec::diffusion(2.0, 0.1);
  const ScaledDomain d = ScaledDomain::scaled({2.0}, 1.0);
  const TrainingSet s = sample_training_set(p, d, {10, 0, 10, 0}, 2);
  const Architecture a = CkanArchitecture::from_shape(2, 1, 3, 2);
  CHECK_THROWS_AS(LossEvaluator(a, {&p, &d, &s, {1, 1, 1, 1, 0}}), std::invalid_argument);
  CHECK_NOTHROW(LossEvaluator(a, {&p, &d, &s, {1, 1, 0, 1, 0}}));
  CHECK_THROWS_AS(LossEvaluator(a, {&p, &d, &s, {-1, 1, 0, 1, 0}}), std::invalid_argument);
  const Architecture wrong = CkanArchitecture::from_shape(1, 1, 3, 2);
  CHECK_THROWS_AS(LossEvaluator(wrong, {&p, &d, &s, {1, 1, 0, 1, 0}}),
                  std::invalid_argument);
  LossEvaluator ev(a, {&p, &d, &s, {1, 1, 0, 1, 0}});
  std::vector<double> g(3);
  CHECK_THROWS_AS(ev.loss_and_gradient(init_params(a, 1).view(), 0, g),
                  std::invalid_argument);
}
