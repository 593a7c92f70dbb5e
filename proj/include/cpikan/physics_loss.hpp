#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cpikan/autodiff.hpp"
#include "cpikan/domain_scaling.hpp"
#include "cpikan/networks.hpp"
#include "cpikan/pde_problems.hpp"

namespace cpikan {

/// total = res * L_res + data * (init * L_init + bc * L_bc + meas * L_meas)
struct LossWeights {
  double res = 1.0;
  double data = 1.0;
  double init = 1.0;
  double bc = 1.0;
  double meas = 0.0;

  void validate() const;
};

/// Mean-squared loss components and their weighted total.
struct LossBreakdown {
  double res = 0.0;
  double init = 0.0;
  double bc = 0.0;
  double meas = 0.0;
  double total = 0.0;
};

double weighted_total(const LossBreakdown& parts, const LossWeights& w);

/// Everything a loss evaluation needs besides the model.
struct LossProblem {
  const ProblemSpec* problem = nullptr;
  const ScaledDomain* domain = nullptr;
  const TrainingSet* data = nullptr;
  LossWeights weights;

  /// Throws if a component with nonzero weight has no points.
  void validate() const;
};

/// u as a function of network coordinates, returned as a second-order jet.
using JetField = std::function<Jet(std::span<const double>)>;

/// Loss of an arbitrary field (no gradient). Used for analytic fields and
/// as an independent route against the network evaluator.
LossBreakdown compute_loss(const JetField& field, double kappa,
                           const LossProblem& lp);

struct EvaluatorOptions {
  int threads = 1;
  bool deterministic = true;
};

/// Loss and its gradient with respect to (network params, kappa) for a fixed
/// training set. Reverse mode: each point is recorded on a PointTape, the
/// residual head on a ScalarTape, and the adjoints are swept back into the
/// parameter gradient.
///
/// Gradient layout: [params..., kappa] where kappa is present only in
/// inverse mode.
class LossEvaluator {
 public:
  LossEvaluator(Architecture arch, LossProblem lp,
                EvaluatorOptions options = {});
  ~LossEvaluator();
  LossEvaluator(const LossEvaluator&) = delete;
  LossEvaluator& operator=(const LossEvaluator&) = delete;

  std::size_t gradient_size() const;
  const LossProblem& problem() const { return lp_; }
  const Architecture& architecture() const { return arch_; }

  LossBreakdown loss(std::span<const double> params, double kappa);
  /// `grad` is overwritten; it must have gradient_size() entries.
  LossBreakdown loss_and_gradient(std::span<const double> params, double kappa,
                                  std::span<double> grad);

 private:
  struct Worker;
  LossBreakdown run(std::span<const double> params, double kappa,
                    std::span<double> grad);

  Architecture arch_;
  LossProblem lp_;
  EvaluatorOptions options_;
  std::vector<std::unique_ptr<Worker>> workers_;
};

}  // namespace cpikan
