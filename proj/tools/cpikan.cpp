// Command-line front end: run one experiment, run a suite, self-check the
// derivative engine, or export the Allen-Cahn reference solution.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "cpikan/allen_cahn_reference.hpp"
#include "cpikan/csv.hpp"
#include "cpikan/derivative_check.hpp"
#include "cpikan/experiment.hpp"

namespace fs = std::filesystem;
using namespace cpikan;

namespace {

struct CommonFlags {
  std::uint64_t seed = 0;
  double epochs_scale = 1.0;
  bool deterministic = false;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--epochs-scale", f.epochs_scale,
                  "Multiply configured epochs (rounded up)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", f.deterministic,
                "Force fixed-order reductions");
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads for loss evaluation")
      ->check(CLI::PositiveNumber);
}

RunOverrides overrides_from(const CLI::App* cmd, const CommonFlags& f) {
  RunOverrides o;
  if (cmd->count("--seed")) o.seed = f.seed;
  if (cmd->count("--epochs-scale")) o.epochs_scale = f.epochs_scale;
  if (f.deterministic) o.deterministic = true;
  if (cmd->count("--out-dir")) o.output_dir = f.out_dir;
  if (cmd->count("--threads")) o.threads = f.threads;
  return o;
}

std::string fmt(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("-");
}

int cmd_run(const std::string& path, const RunOverrides& o) {
  const ExperimentConfig c = apply_overrides(load_config(path), o);
  const fs::path dir = fs::path(c.output_dir) / c.name;
  const ExperimentResult r = run_experiment(c, dir);
  std::cout << c.name << ": status " << to_string(r.status) << ", RE(u) "
            << fmt(r.re_u);
  if (r.re_f) std::cout << ", RE(f) " << fmt(r.re_f);
  if (r.kappa) std::cout << ", kappa " << fmt(r.kappa) << " (rel. err "
                         << fmt(r.re_kappa) << ")";
  std::cout << ", final loss " << format_number(r.final_loss.total) << ", "
            << r.wall_seconds << " s\n";
  if (!r.diagnostic.empty()) std::cout << "  " << r.diagnostic << '\n';
  std::cout << "artifacts in " << dir.string() << '\n';
  return 0;
}

int cmd_suite(const std::string& path, const RunOverrides& o,
              const std::string& out_flag) {
  const std::vector<SuiteEntry> entries = load_suite(path);
  const fs::path out =
      !out_flag.empty() ? fs::path(out_flag)
                        : fs::path("runs") / fs::path(path).stem();
  RunOverrides per_run = o;
  per_run.output_dir.reset();
  const std::vector<SuiteRow> rows = run_suite(entries, per_run, out);
  for (const SuiteRow& r : rows) {
    std::cout << r.name << ": " << r.status << " RE(u) " << fmt(r.re_u);
    if (r.re_kappa) std::cout << " RE(kappa) " << fmt(r.re_kappa);
    if (!r.message.empty()) std::cout << "  [" << r.message << "]";
    std::cout << '\n';
  }
  std::cout << rows.size() << " experiments, table at "
            << (out / "table.csv").string() << '\n';
  return 0;
}

int cmd_emit_reference(const std::string& problem, double M, double D,
                       double T, int nx, int nt, const std::string& out) {
  if (problem != "allen-cahn" && problem != "allen_cahn") {
    std::cerr << "emit-reference: only --problem allen-cahn is supported\n";
    return 2;
  }
  const ProblemSpec p = ProblemSpec::allen_cahn(M, D, T);
  const FdGrid grid = default_allen_cahn_grid(p);
  const double change = refinement_change(allen_cahn_system(p), grid);
  std::cout << "grid " << grid.intervals << " intervals x " << grid.steps
            << " steps, refinement change " << format_number(change) << '\n';
  if (!(change < kReferenceRefinementTolerance)) {
    std::cerr << "refinement check failed (tolerance "
              << kReferenceRefinementTolerance << ")\n";
    return 1;
  }
  const GridSolution sol = reference_solution(p, grid, false);
  CsvWriter w(out);
  w.header({"x", "t", "u"});
  for (int j = 0; j < nt; ++j) {
    const double t = j + 1 == nt ? T : T * j / (nt - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = i + 1 == nx ? M : -M + 2.0 * M * i / (nx - 1);
      w.row(std::vector<double>{x, t, sol.at(x, t)});
    }
  }
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev KAN and MLP physics-informed solvers on rescaled domains"};
  app.require_subcommand(1);

  std::string config_path, manifest_path;
  CommonFlags run_flags, suite_flags;

  auto* run = app.add_subcommand("run", "Train one experiment from a config");
  run->add_option("config", config_path, "YAML or JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(run, run_flags);

  auto* suite = app.add_subcommand("suite", "Run every experiment of a manifest");
  suite->add_option("manifest", manifest_path, "Suite manifest")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(suite, suite_flags);

  DerivativeCheckOptions dopts;
  auto* check = app.add_subcommand(
      "check-derivatives", "Compare exact derivatives with finite differences");
  check->add_option("--networks", dopts.networks, "Random networks per family");
  check->add_option("--seed", dopts.seed, "RNG seed");

  std::string problem = "allen-cahn", ref_out = "reference.csv";
  double ref_M = 2.0, ref_D = 1e-4, ref_T = 1.0;
  int ref_nx = 257, ref_nt = 101;
  auto* emit = app.add_subcommand("emit-reference",
                                  "Write the Allen-Cahn reference solution");
  emit->add_option("--problem", problem, "Problem (allen-cahn)");
  emit->add_option("--M", ref_M, "Half width");
  emit->add_option("--D", ref_D, "Diffusion coefficient");
  emit->add_option("--final-time", ref_T, "Final time");
  emit->add_option("--nx", ref_nx, "Output nodes in x")->check(CLI::Range(2, 1 << 20));
  emit->add_option("--nt", ref_nt, "Output levels in t")->check(CLI::Range(2, 1 << 20));
  emit->add_option("--out", ref_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, overrides_from(run, run_flags));
    if (*suite) {
      return cmd_suite(manifest_path, overrides_from(suite, suite_flags),
                       suite_flags.out_dir);
    }
    if (*check) {
      const DerivativeCheckReport r = check_derivatives(dopts);
      std::cout << r.summary() << '\n';
      return r.passed ? 0 : 1;
    }
    if (*emit) {
      return cmd_emit_reference(problem, ref_M, ref_D, ref_T, ref_nx, ref_nt,
                                ref_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
