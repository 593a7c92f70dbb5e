#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpikan/allen_cahn_reference.hpp"
#include "cpikan/networks.hpp"
#include "cpikan/pde_problems.hpp"
#include "cpikan/physics_loss.hpp"
#include "cpikan/trainer.hpp"

namespace cpikan {

enum class Method { ScaledCkan, ScaledMlp, Ckan, Mlp };
std::string to_string(Method m);
Method method_from_string(const std::string& name);
bool is_scaled(Method m);
bool is_kan(Method m);

/// (N_l, N_n, k): hidden layers, neurons per hidden layer, Chebyshev degree.
struct NetworkShape {
  int hidden_layers = 0;
  int width = 0;
  int degree = 0;  // unused by MLPs
};

struct ReferenceGridConfig {
  FdGrid grid;
  bool verify = true;
};

/// One fully specified run. Everything random derives from `seed`.
struct ExperimentConfig {
  std::string name = "experiment";
  Method method = Method::ScaledCkan;
  ProblemSpec problem;
  NetworkShape ckan;  // used by scaled_ckan and ckan
  NetworkShape mlp;   // used by scaled_mlp and mlp
  LossWeights weights;
  PointCounts points;
  NoiseSpec noise;
  TrainingConfig training;
  std::uint64_t seed = 1;
  bool deterministic = true;
  int threads = 1;
  std::string output_dir = "runs";
  std::optional<ReferenceGridConfig> reference;  // Allen-Cahn only

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  Architecture architecture() const;
  ScaledDomain domain() const;
};

/// Reads a YAML (or JSON) experiment file. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig parse_config(const std::string& text);

/// Canonical JSON text of a config; parse_config accepts it back.
std::string config_to_json(const ExperimentConfig& config);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> epochs_scale;
  std::optional<bool> deterministic;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
};

/// Applies CLI overrides; epochs become ceil(epochs * scale).
ExperimentConfig apply_overrides(ExperimentConfig config,
                                 const RunOverrides& overrides);

struct ExperimentResult {
  std::string name;
  Method method = Method::ScaledCkan;
  TrainingStatus status = TrainingStatus::Ok;
  std::string diagnostic;
  std::size_t parameter_count = 0;
  std::optional<double> re_u;
  std::optional<double> re_f;      // reaction_diffusion only
  std::optional<double> kappa;     // inverse mode only
  std::optional<double> re_kappa;  // inverse mode only
  LossBreakdown final_loss;
  int epochs_run = 0;
  double wall_seconds = 0.0;
};

/// Trains one model and writes into `dir`: config.json, history.csv,
/// predictions.csv, summary.json, checkpoint.json (plus checkpoint_<epoch>.json
/// when periodic checkpoints are enabled). `dir` defaults to
/// config.output_dir / config.name.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::optional<std::filesystem::path> dir = {});

/// Suite manifest: `base` (path or inline config), `sweep` (map from dotted
/// config keys to value lists, expanded as a Cartesian product in listed
/// order) and/or `experiments` (paths or inline overrides of `base`).
struct SuiteEntry {
  ExperimentConfig config;
  std::string error;  // set when the entry could not be built
};
std::vector<SuiteEntry> load_suite(const std::filesystem::path& manifest);

struct SuiteRow {
  std::string name;
  std::string method;
  double half_width = 0.0;
  double delta_u = 0.0;
  double delta_f = 0.0;
  std::string status;  // ok, diverged, failed
  std::size_t parameter_count = 0;
  std::optional<double> re_u, re_f, re_kappa;
  std::optional<double> final_loss;
  std::string message;
};

/// Runs every entry, catching per-experiment failures, and writes table.csv
/// into `out_dir`.
std::vector<SuiteRow> run_suite(const std::vector<SuiteEntry>& entries,
                                const RunOverrides& overrides,
                                const std::filesystem::path& out_dir);

void write_suite_table(const std::filesystem::path& file,
                       const std::vector<SuiteRow>& rows);

}  // namespace cpikan
