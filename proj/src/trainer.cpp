#include "cpikan/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cpikan/csv.hpp"
#include "json.hpp"

namespace cpikan {

void TrainingConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("training.epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("training.learning_rate must be > 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("training.beta1/beta2 must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("training.epsilon must be > 0");
  if (log_interval < 1) {
    throw std::invalid_argument("training.log_interval must be >= 1");
  }
  if (checkpoint_interval < 0) {
    throw std::invalid_argument("training.checkpoint_interval must be >= 0");
  }
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate),
      b1_(beta1),
      b2_(beta2),
      eps_(epsilon),
      m_(size, 0.0),
      v_(size, 0.0) {}

void Adam::step(std::span<double> x, std::span<const double> grad) {
  if (x.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("adam: size mismatch");
  }
  ++t_;
  b1_pow_ *= b1_;
  b2_pow_ *= b2_;
  const double c1 = 1.0 / (1.0 - b1_pow_);
  const double c2 = 1.0 / (1.0 - b2_pow_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = grad[i];
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * g;
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * g * g;
    const double mhat = m_[i] * c1;
    const double vhat = v_[i] * c2;
    x[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

std::string to_string(TrainingStatus s) {
  return s == TrainingStatus::Ok ? "ok" : "diverged";
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

TrainingRecord train(LossEvaluator& ev, NetworkParams init, double kappa,
                     bool inverse, const TrainingConfig& cfg,
                     const CheckpointFn& checkpoint) {
  cfg.validate();
  validate_params(ev.architecture(), init);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = init.size();

  // Optimized vector: params followed by kappa in inverse mode.
  std::vector<double> x = std::move(init.flat);
  if (inverse) x.push_back(kappa);
  std::vector<double> grad(ev.gradient_size(), 0.0);
  std::vector<double> last_good = x;
  Adam adam(x.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);

  TrainingRecord rec;
  auto current_kappa = [&] { return inverse ? x[n] : kappa; };
  auto net = [&] { return std::span<const double>(x.data(), n); };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossBreakdown loss = ev.loss_and_gradient(net(), current_kappa(), grad);
    if (!std::isfinite(loss.total) || !all_finite(grad)) {
      rec.status = TrainingStatus::Diverged;
      rec.diverged_epoch = epoch;
      rec.diagnostic = "non-finite loss or gradient at epoch " +
                       std::to_string(epoch) + " (total loss " +
                       format_number(loss.total) + ")";
      break;
    }
    if (epoch % cfg.log_interval == 0) {
      rec.history.push_back({epoch, loss, current_kappa()});
      if (inverse) rec.kappa_trajectory.push_back(current_kappa());
    }
    last_good = x;
    adam.step(x, grad);
    rec.epochs_run = epoch + 1;
    if (checkpoint && cfg.checkpoint_interval > 0 &&
        rec.epochs_run % cfg.checkpoint_interval == 0) {
      NetworkParams snapshot{std::vector<double>(x.begin(), x.begin() + n)};
      checkpoint(rec.epochs_run, snapshot, current_kappa());
    }
  }

  if (rec.status == TrainingStatus::Diverged) x = last_good;
  rec.kappa = current_kappa();
  rec.params.flat.assign(x.begin(), x.begin() + n);
  rec.final_loss = ev.loss(rec.params.view(), rec.kappa);
  if (rec.status == TrainingStatus::Ok && !std::isfinite(rec.final_loss.total)) {
    rec.status = TrainingStatus::Diverged;
    rec.diverged_epoch = cfg.epochs;
    rec.diagnostic = "non-finite loss after the final update";
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

}  // namespace

TrainingRecord train_forward(LossEvaluator& evaluator, NetworkParams init,
                             const TrainingConfig& config,
                             const CheckpointFn& checkpoint) {
  const ProblemSpec& p = *evaluator.problem().problem;
  if (p.inverse) {
    throw std::invalid_argument("train_forward: problem is in inverse mode");
  }
  return train(evaluator, std::move(init), p.params.kappa, false, config,
               checkpoint);
}

TrainingRecord train_inverse(LossEvaluator& evaluator, NetworkParams init,
                             double kappa0, const TrainingConfig& config,
                             const CheckpointFn& checkpoint) {
  const LossProblem& lp = evaluator.problem();
  if (!lp.problem->inverse) {
    throw std::invalid_argument("train_inverse: problem is not in inverse mode");
  }
  if (lp.data->measurement.empty()) {
    throw std::invalid_argument("train_inverse: no measurement points");
  }
  if (!std::isfinite(kappa0)) {
    throw std::invalid_argument("train_inverse: initial kappa must be finite");
  }
  return train(evaluator, std::move(init), kappa0, true, config, checkpoint);
}

double relative_l2(std::span<const double> predicted,
                   std::span<const double> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("relative_l2: size mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    num += e * e;
    den += truth[i] * truth[i];
  }
  if (!(den > 0.0)) {
    throw std::invalid_argument("relative_l2: truth has zero norm");
  }
  return std::sqrt(num) / std::sqrt(den);
}

void write_history_csv(const std::filesystem::path& file,
                       const std::vector<HistoryEntry>& history,
                       bool with_kappa) {
  CsvWriter w(file);
  std::vector<std::string> header{"epoch", "res", "init", "bc", "meas", "total"};
  if (with_kappa) header.push_back("kappa");
  w.header(header);
  for (const auto& h : history) {
    std::vector<double> row{static_cast<double>(h.epoch), h.loss.res,
                            h.loss.init, h.loss.bc, h.loss.meas, h.loss.total};
    if (with_kappa) row.push_back(h.kappa);
    w.row(row);
  }
}

void write_checkpoint(const std::filesystem::path& file, const Checkpoint& c) {
  using nlohmann::json;
  json arch;
  if (const auto* k = std::get_if<CkanArchitecture>(&c.arch)) {
    arch = {{"kind", "ckan"}, {"widths", k->widths}, {"degree", k->degree}};
  } else {
    arch = {{"kind", "mlp"},
            {"widths", std::get<MlpArchitecture>(c.arch).widths},
            {"activation", "tanh"}};
  }
  json j = {{"architecture", arch}, {"epoch", c.epoch}, {"params", c.params.flat}};
  j["kappa"] = c.kappa ? json(*c.kappa) : json(nullptr);
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(1) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& file) {
  using nlohmann::json;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  const json j = json::parse(in);
  Checkpoint c;
  const json& a = j.at("architecture");
  const std::string kind = a.at("kind");
  if (kind == "ckan") {
    CkanArchitecture k;
    k.widths = a.at("widths").get<std::vector<int>>();
    k.degree = a.at("degree");
    k.validate();
    c.arch = k;
  } else if (kind == "mlp") {
    MlpArchitecture m;
    m.widths = a.at("widths").get<std::vector<int>>();
    m.validate();
    c.arch = m;
  } else {
    throw std::runtime_error("checkpoint: unknown architecture kind " + kind);
  }
  c.params.flat = j.at("params").get<std::vector<double>>();
  validate_params(c.arch, c.params);
  if (!j.at("kappa").is_null()) c.kappa = j.at("kappa").get<double>();
  c.epoch = j.value("epoch", 0);
  return c;
}

}  // namespace cpikan
