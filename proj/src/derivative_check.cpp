#include "cpikan/derivative_check.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "cpikan/networks.hpp"
#include "cpikan/pde_problems.hpp"
#include "cpikan/physics_loss.hpp"

namespace cpikan {

std::string DerivativeCheckReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d networks: d1 %.3e, d2 %.3e, loss gradient %.3e -> %s",
                networks, worst_d1, worst_d2, worst_grad,
                passed ? "PASS" : "FAIL");
  return buf;
}

namespace {

template <class F>
double stencil_d1(F&& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

template <class F>
double stencil_d2(F&& f, double h) {
  return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) /
         (12 * h * h);
}

double rel(double exact, double approx, double floor) {
  return std::abs(exact - approx) / std::max(std::abs(approx), floor);
}

Architecture random_arch(std::mt19937_64& rng, bool kan, int in) {
  std::uniform_int_distribution<int> layers(1, 2), width(2, 5), degree(1, 5);
  if (kan) {
    return CkanArchitecture::from_shape(in, layers(rng), width(rng), degree(rng));
  }
  return MlpArchitecture::from_shape(in, layers(rng), width(rng));
}

ProblemSpec random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  const double Ms[] = {1.0, 2.0, 4.0, 6.0};
  const double M = Ms[std::uniform_int_distribution<int>(0, 3)(rng)];
  switch (pick(rng)) {
    case 0: return ProblemSpec::diffusion(M, 0.1);
    case 1: return ProblemSpec::helmholtz(M, M / 2, 0.25, 1.0, 1.0);
    case 2: return ProblemSpec::allen_cahn(M, 1e-4);
    case 3: return ProblemSpec::reaction_diffusion(M, 0.01, 0.7, false);
    default: return ProblemSpec::reaction_diffusion(M, 0.01, 0.7, true);
  }
}

}  // namespace

DerivativeCheckReport check_derivatives(const DerivativeCheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 3);
  DerivativeCheckReport r;

  for (int n = 0; n < o.networks; ++n) {
    for (bool kan : {true, false}) {
      const int in = dims(rng);
      const Architecture arch = random_arch(rng, kan, in);
      NetworkParams params = init_params(arch, rng());
      for (double& v : params.flat) v *= 3.0;
      std::vector<double> x(in);
      for (double& v : x) v = 0.9 * unit(rng);
      const Jet u = forward_jet(arch, params, x)[0];
      for (int a = 0; a < in; ++a) {
        auto f = [&](double h) {
          std::vector<double> y = x;
          y[a] += h;
          return forward(arch, params, y)[0];
        };
        r.worst_d1 = std::max(r.worst_d1, rel(u.d[a], stencil_d1(f, 1e-3), 1e-3));
        r.worst_d2 = std::max(r.worst_d2, rel(u.dd[a], stencil_d2(f, 1e-3), 1e-3));
      }
      ++r.networks;
    }

    // Loss gradient along a random direction.
    const ProblemSpec p = random_problem(rng);
    const bool scaled = unit(rng) > 0.0;
    const ScaledDomain domain =
        scaled ? ScaledDomain::scaled(p.half_widths, p.final_time)
               : ScaledDomain::unscaled(p.half_widths, p.final_time);
    PointCounts counts{8, p.time_dependent() ? 4 : 0, 4, p.inverse ? 4 : 0};
    const TrainingSet data = sample_training_set(p, domain, counts, rng(),
                                                 {0.01, 0.01});
    LossWeights w{0.5, 1.0, 1.0, 1.0, p.inverse ? 1.0 : 0.0};
    if (!p.time_dependent()) w.init = 0.0;
    const Architecture arch = random_arch(rng, n % 2 == 0, p.input_dim());
    LossEvaluator ev(arch, LossProblem{&p, &domain, &data, w});
    const NetworkParams params = init_params(arch, rng());
    const double kappa = p.inverse ? 0.3 : p.params.kappa;

    std::vector<double> dir(ev.gradient_size());
    double norm = 0.0;
    for (double& v : dir) {
      v = unit(rng);
      norm += v * v;
    }
    for (double& v : dir) v /= std::sqrt(norm);
    std::vector<double> grad(ev.gradient_size());
    ev.loss_and_gradient(params.view(), kappa, grad);
    double exact = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) exact += grad[i] * dir[i];

    const std::size_t np = params.size();
    auto f = [&](double h) {
      NetworkParams q = params;
      for (std::size_t i = 0; i < np; ++i) q.flat[i] += h * dir[i];
      const double k = p.inverse ? kappa + h * dir[np] : kappa;
      return ev.loss(q.view(), k).total;
    };
    r.worst_grad = std::max(r.worst_grad, rel(exact, stencil_d1(f, 1e-4), 1e-6));
  }
  r.passed = r.worst_d1 <= o.tol_d1 && r.worst_d2 <= o.tol_d2 &&
             r.worst_grad <= o.tol_grad;
  return r;
}

}  // namespace cpikan
