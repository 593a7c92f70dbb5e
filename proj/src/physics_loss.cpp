#include "cpikan/physics_loss.hpp"

#include <atomic>
#include <stdexcept>
#include <string>
#include <thread>

namespace cpikan {

void LossWeights::validate() const {
  for (double w : {res, data, init, bc, meas}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("loss weights must be finite and >= 0");
    }
  }
}

double weighted_total(const LossBreakdown& parts, const LossWeights& w) {
  return w.res * parts.res +
         w.data * (w.init * parts.init + w.bc * parts.bc + w.meas * parts.meas);
}

void LossProblem::validate() const {
  if (!problem || !domain || !data) {
    throw std::invalid_argument("loss: problem, domain and data are required");
  }
  weights.validate();
  auto need = [](double w, const PointSet& s, const char* name) {
    if (w != 0.0 && s.empty()) {
      throw std::invalid_argument(std::string("loss: nonzero weight on empty ") +
                                  name + " point set");
    }
  };
  need(weights.res, data->residual, "residual");
  need(weights.data * weights.init, data->initial, "initial");
  need(weights.data * weights.bc, data->boundary, "boundary");
  need(weights.data * weights.meas, data->measurement, "measurement");
  const int dim = problem->input_dim();
  for (const PointSet* s :
       {&data->residual, &data->initial, &data->boundary, &data->measurement}) {
    if (!s->empty() && s->dim != dim) {
      throw std::invalid_argument("loss: point dimension does not match problem");
    }
  }
}

namespace {

double mean_or_zero(double sum, std::size_t n) {
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

LossBreakdown finish(const double sums[4], const TrainingSet& d,
                     const LossWeights& w) {
  LossBreakdown b;
  b.res = mean_or_zero(sums[0], d.residual.size());
  b.init = mean_or_zero(sums[1], d.initial.size());
  b.bc = mean_or_zero(sums[2], d.boundary.size());
  b.meas = mean_or_zero(sums[3], d.measurement.size());
  b.total = weighted_total(b, w);
  return b;
}

}  // namespace

LossBreakdown compute_loss(const JetField& field, double kappa,
                           const LossProblem& lp) {
  lp.validate();
  const TrainingSet& d = *lp.data;
  double sums[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < d.residual.size(); ++i) {
    const Jet u = field(d.residual.point(i));
    const double r = residual(*lp.problem, *lp.domain, u, kappa,
                              d.residual.targets[i]);
    sums[0] += r * r;
  }
  const PointSet* sets[3] = {&d.initial, &d.boundary, &d.measurement};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < sets[k]->size(); ++i) {
      const double e = field(sets[k]->point(i)).value - sets[k]->targets[i];
      sums[k + 1] += e * e;
    }
  }
  return finish(sums, d, lp.weights);
}

// ---------------------------------------------------------------------------

struct LossEvaluator::Worker {
  explicit Worker(const Architecture& arch, std::size_t grad_size)
      : tape(arch), grad(grad_size, 0.0) {}

  PointTape tape;
  ScalarTape head;
  std::vector<double> adjoints;
  std::vector<double> grad;
  double sums[4] = {0, 0, 0, 0};
};

LossEvaluator::LossEvaluator(Architecture arch, LossProblem lp,
                             EvaluatorOptions options)
    : arch_(std::move(arch)), lp_(lp), options_(options) {
  lp_.validate();
  if (input_dim(arch_) != lp_.problem->input_dim() || output_dim(arch_) != 1) {
    throw std::invalid_argument("loss: network shape does not fit the problem (" +
                                describe(arch_) + ")");
  }
  const int threads = std::max(1, options_.threads);
  for (int t = 0; t < threads; ++t) {
    workers_.push_back(std::make_unique<Worker>(arch_, gradient_size()));
  }
}

LossEvaluator::~LossEvaluator() = default;

std::size_t LossEvaluator::gradient_size() const {
  return parameter_count(arch_) + lp_.problem->trainable_count();
}

LossBreakdown LossEvaluator::loss(std::span<const double> params,
                                  double kappa) {
  return run(params, kappa, {});
}

LossBreakdown LossEvaluator::loss_and_gradient(std::span<const double> params,
                                               double kappa,
                                               std::span<double> grad) {
  if (grad.size() != gradient_size()) {
    throw std::invalid_argument("loss: gradient buffer has wrong size");
  }
  return run(params, kappa, grad);
}

LossBreakdown LossEvaluator::run(std::span<const double> params, double kappa,
                                 std::span<double> grad) {
  if (params.size() != parameter_count(arch_)) {
    throw std::invalid_argument("loss: parameter vector size mismatch");
  }
  const ProblemSpec& problem = *lp_.problem;
  const ScaledDomain& domain = *lp_.domain;
  const TrainingSet& d = *lp_.data;
  const LossWeights& w = lp_.weights;
  const bool want_grad = !grad.empty();
  const bool inverse = problem.inverse;
  const std::size_t n_params = params.size();
  const int dim = problem.input_dim();

  const PointSet* sets[4] = {&d.residual, &d.initial, &d.boundary,
                             &d.measurement};
  // d(total)/d(sum of squares of component k)
  const double scale[4] = {
      w.res / std::max<std::size_t>(1, d.residual.size()),
      w.data * w.init / std::max<std::size_t>(1, d.initial.size()),
      w.data * w.bc / std::max<std::size_t>(1, d.boundary.size()),
      w.data * w.meas / std::max<std::size_t>(1, d.measurement.size())};
  const std::size_t offsets[5] = {
      0, d.residual.size(), d.residual.size() + d.initial.size(),
      d.residual.size() + d.initial.size() + d.boundary.size(),
      d.residual.size() + d.initial.size() + d.boundary.size() +
          d.measurement.size()};
  const std::size_t total_points = offsets[4];

  auto process = [&](Worker& wk, std::size_t idx) {
    int k = 0;
    while (idx >= offsets[k + 1]) ++k;
    const std::size_t i = idx - offsets[k];
    const PointSet& s = *sets[k];
    const bool backprop = want_grad && scale[k] != 0.0;
    if (k == 0) {
      auto out = wk.tape.record(params, s.point(i), JetOrder::SecondOrder);
      const Jet& u = out[0];
      if (!backprop) {
        const double r = residual(problem, domain, u, kappa, s.targets[i]);
        wk.sums[0] += r * r;
        return;
      }
      ScalarTape& tape = wk.head;
      tape.clear();
      BasicJet<Var> uv;
      uv.dim = u.dim;
      uv.order = u.order;
      uv.value = tape.variable(u.value);
      for (int c = 0; c < dim; ++c) {
        uv.d[c] = tape.variable(u.d[c]);
        uv.dd[c] = tape.variable(u.dd[c]);
      }
      for (int c = dim; c < static_cast<int>(kMaxInputs); ++c) {
        uv.d[c] = tape.constant(0.0);
        uv.dd[c] = tape.constant(0.0);
      }
      const Var kv = tape.variable(kappa);
      const Var r = residual(problem, domain, uv, kv, s.targets[i]);
      wk.sums[0] += r.value * r.value;
      tape.gradient_into(r, wk.adjoints);
      const double g = 2.0 * r.value * scale[0];
      Jet adj;
      adj.dim = u.dim;
      adj.order = u.order;
      adj.value = g * wk.adjoints[uv.value.index];
      for (int c = 0; c < dim; ++c) {
        adj.d[c] = g * wk.adjoints[uv.d[c].index];
        adj.dd[c] = g * wk.adjoints[uv.dd[c].index];
      }
      wk.tape.backward({&adj, 1}, {wk.grad.data(), n_params});
      if (inverse) wk.grad[n_params] += g * wk.adjoints[kv.index];
    } else {
      auto out = wk.tape.record(params, s.point(i), JetOrder::ValueOnly);
      const double e = out[0].value - s.targets[i];
      wk.sums[k] += e * e;
      if (backprop) {
        Jet adj;
        adj.dim = out[0].dim;
        adj.order = JetOrder::ValueOnly;
        adj.value = 2.0 * e * scale[k];
        wk.tape.backward({&adj, 1}, {wk.grad.data(), n_params});
      }
    }
  };

  for (auto& wk : workers_) {
    std::fill(std::begin(wk->sums), std::end(wk->sums), 0.0);
    if (want_grad) std::fill(wk->grad.begin(), wk->grad.end(), 0.0);
  }

  const std::size_t n_workers = workers_.size();
  if (n_workers == 1) {
    for (std::size_t p = 0; p < total_points; ++p) process(*workers_[0], p);
  } else if (options_.deterministic) {
    // Static contiguous partition, reduced in worker order.
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) {
      const std::size_t b = total_points * t / n_workers;
      const std::size_t e = total_points * (t + 1) / n_workers;
      pool.emplace_back([&, t, b, e] {
        for (std::size_t p = b; p < e; ++p) process(*workers_[t], p);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) {
      pool.emplace_back([&, t] {
        for (;;) {
          const std::size_t b = next.fetch_add(kChunk);
          if (b >= total_points) break;
          const std::size_t e = std::min(total_points, b + kChunk);
          for (std::size_t p = b; p < e; ++p) process(*workers_[t], p);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  double sums[4] = {0, 0, 0, 0};
  for (const auto& wk : workers_) {
    for (int k = 0; k < 4; ++k) sums[k] += wk->sums[k];
  }
  if (want_grad) {
    std::copy(workers_[0]->grad.begin(), workers_[0]->grad.end(), grad.begin());
    for (std::size_t t = 1; t < n_workers; ++t) {
      const auto& g = workers_[t]->grad;
      for (std::size_t j = 0; j < g.size(); ++j) grad[j] += g[j];
    }
  }
  return finish(sums, d, w);
}

}  // namespace cpikan
