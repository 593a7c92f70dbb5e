#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpikan/networks.hpp"
#include "cpikan/physics_loss.hpp"

namespace cpikan {

struct TrainingConfig {
  int epochs = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int log_interval = 100;
  int checkpoint_interval = 0;  // 0 disables periodic checkpoints

  void validate() const;
};

/// Full-batch Adam over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> x, std::span<const double> grad);
  long steps() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  double b1_pow_ = 1.0, b2_pow_ = 1.0;
  long t_ = 0;
  std::vector<double> m_, v_;
};

struct HistoryEntry {
  int epoch = 0;
  LossBreakdown loss;
  double kappa = 0.0;
};

enum class TrainingStatus { Ok, Diverged };
std::string to_string(TrainingStatus s);

struct TrainingRecord {
  TrainingStatus status = TrainingStatus::Ok;
  std::string diagnostic;
  int diverged_epoch = -1;

  std::vector<HistoryEntry> history;  // one entry per log interval
  NetworkParams params;
  double kappa = 0.0;
  std::vector<double> kappa_trajectory;  // inverse mode, one per log entry
  LossBreakdown final_loss;              // at the returned parameters
  int epochs_run = 0;
  double wall_seconds = 0.0;
};

/// Called every checkpoint_interval epochs with the current state.
using CheckpointFn =
    std::function<void(int epoch, const NetworkParams& params, double kappa)>;

/// Minimizes the loss over the network parameters with kappa fixed to the
/// problem value. Throws std::invalid_argument for an inverse problem.
/// A non-finite loss or gradient stops training with status Diverged; the
/// record then holds the last finite parameters.
TrainingRecord train_forward(LossEvaluator& evaluator, NetworkParams init,
                             const TrainingConfig& config,
                             const CheckpointFn& checkpoint = {});

/// Minimizes jointly over (params, kappa). Requires an inverse problem with
/// measurement points.
TrainingRecord train_inverse(LossEvaluator& evaluator, NetworkParams init,
                             double kappa0, const TrainingConfig& config,
                             const CheckpointFn& checkpoint = {});

/// ||truth - predicted|| / ||truth||. Throws on size mismatch or zero truth.
double relative_l2(std::span<const double> predicted,
                   std::span<const double> truth);

/// Writes history as CSV with columns epoch,res,init,bc,meas,total (and
/// kappa when `with_kappa`).
void write_history_csv(const std::filesystem::path& file,
                       const std::vector<HistoryEntry>& history,
                       bool with_kappa);

struct Checkpoint {
  Architecture arch;
  NetworkParams params;
  std::optional<double> kappa;
  int epoch = 0;
};

void write_checkpoint(const std::filesystem::path& file, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& file);

}  // namespace cpikan
