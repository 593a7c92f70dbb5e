// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Pass criterion numbers as arguments to
// run a subset, e.g. `acceptance 1 2 3`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpikan/allen_cahn_reference.hpp"
#include "cpikan/csv.hpp"
#include "cpikan/experiment.hpp"

using namespace cpikan;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const fs::path kConfigs = CPIKAN_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

fs::path work_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "cpikan_acceptance" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

ExperimentConfig config(const std::string& file) {
  ExperimentConfig c = load_config(kConfigs / file);
  c.threads = 1;
  c.deterministic = true;
  return c;
}

// ---------------------------------------------------------------------------
// 1. Derivatives against finite differences

double fd1(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

double fd2(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
}

// Relative error with an absolute floor so that near-zero derivatives do not
// blow up the ratio.
double rel_err(double exact, double approx, double floor) {
  return std::abs(exact - approx) / std::max(std::abs(approx), floor);
}

Outcome derivatives() {
  constexpr int kNetworks = 50;
  constexpr double kTolD1 = 1e-5, kTolD2 = 1e-4, kTolGrad = 1e-4;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 3), layers(1, 3), width(2, 6), degree(1, 6);
  double w1 = 0, w2 = 0, wg = 0;

  for (int n = 0; n < kNetworks; ++n) {
    for (bool kan : {true, false}) {
      const int in = dim(rng);
      const Architecture a =
          kan ? Architecture(CkanArchitecture::from_shape(in, layers(rng), width(rng),
                                                          degree(rng)))
              : Architecture(MlpArchitecture::from_shape(in, layers(rng), width(rng)));
      NetworkParams p = init_params(a, rng());
      for (double& v : p.flat) v *= 2.0;
      std::vector<double> x(in);
      for (double& v : x) v = 0.9 * unit(rng);
      const Jet u = forward_jet(a, p, x)[0];
      for (int k = 0; k < in; ++k) {
        const auto f = [&](double h) {
          std::vector<double> y = x;
          y[k] += h;
          return forward(a, p, y)[0];
        };
        w1 = std::max(w1, rel_err(u.d[k], fd1(f, 1e-3), 1e-3));
        w2 = std::max(w2, rel_err(u.dd[k], fd2(f, 1e-3), 1e-3));
      }
    }
  }

  // Directional derivative of the full loss, one small problem per network.
  for (int n = 0; n < 2 * kNetworks; ++n) {
    const double M = 2.0 * (1 + n % 3);
    ProblemSpec p;
    switch (n % 4) {
      case 0: p = ProblemSpec::diffusion(M, 0.1); break;
      case 1: p = ProblemSpec::helmholtz(M, M, 0.25, 1.0, 1.0); break;
      case 2: p = ProblemSpec::allen_cahn(M, 1e-4); break;
      default: p = ProblemSpec::reaction_diffusion(M, 0.01, 0.7, true); break;
    }
    const ScaledDomain d = n % 8 < 4 ? ScaledDomain::scaled(p.half_widths, p.final_time)
                                     : ScaledDomain::unscaled(p.half_widths, p.final_time);
    const bool timed = p.time_dependent();
    const FieldFn truth = [](std::span<const double> x, double t) {
      return std::sin(x[0]) * (1 - t);
    };
    const TrainingSet s = sample_training_set(
        p, d, {10, timed ? 5 : 0, 4, p.inverse || n % 4 == 2 ? 5 : 0}, rng(), {0.02, 0.02},
        truth);
    LossWeights w{0.7, 1.0, timed ? 1.0 : 0.0, 1.0, s.measurement.size() ? 1.0 : 0.0};
    const Architecture a =
        n % 2 ? Architecture(CkanArchitecture::from_shape(p.input_dim(), 2, 4, 4))
              : Architecture(MlpArchitecture::from_shape(p.input_dim(), 2, 6));
    LossEvaluator ev(a, {&p, &d, &s, w});
    const NetworkParams params = init_params(a, rng());
    const double kappa = p.inverse ? 0.4 : p.params.kappa;
    std::vector<double> g(ev.gradient_size()), dir(g.size());
    for (double& v : dir) v = unit(rng);
    ev.loss_and_gradient(params.view(), kappa, g);
    double exact = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) exact += g[i] * dir[i];
    const auto f = [&](double h) {
      NetworkParams q = params;
      for (std::size_t i = 0; i < q.size(); ++i) q.flat[i] += h * dir[i];
      return ev.loss(q.view(), p.inverse ? kappa + h * dir.back() : kappa).total;
    };
    wg = std::max(wg, rel_err(exact, fd1(f, 1e-4), 1e-6));
  }
  return {w1 <= kTolD1 && w2 <= kTolD2 && wg <= kTolGrad,
          "worst d1 " + sci(w1) + ", d2 " + sci(w2) + ", loss gradient " + sci(wg)};
}

// ---------------------------------------------------------------------------
// 2. Analytic solutions through the scaled residual operators

// Derivatives of the physical solution: value, d/dx_a, d2/dx_a2 per axis.
struct Analytic {
  double value;
  double d[3];
  double dd[3];
};

Jet to_network_jet(const ScaledDomain& dom, const Analytic& a, int dim) {
  Jet j;
  j.dim = dim;
  j.value = a.value;
  for (int k = 0; k < dim; ++k) {
    // x = scale * x~, so d/dx~ = scale * d/dx.
    const double s = k < static_cast<int>(dom.spatial_dim()) ? dom.scales()[k] : 1.0;
    j.d[k] = s * a.d[k];
    j.dd[k] = s * s * a.dd[k];
  }
  return j;
}

double worst_residual(const ProblemSpec& p, std::uint64_t seed,
                      const std::function<Analytic(std::span<const double>)>& truth) {
  constexpr int kPoints = 1000;
  const ScaledDomain dom = ScaledDomain::scaled(p.half_widths, p.final_time);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int sdim = p.spatial_dim();
  double worst = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    std::vector<double> x(p.input_dim());
    for (int k = 0; k < sdim; ++k) x[k] = p.half_widths[k] * unit(rng);
    if (p.time_dependent()) x[sdim] = p.final_time * 0.5 * (unit(rng) + 1);
    const double t = p.time_dependent() ? x[sdim] : 0.0;
    const Jet j = to_network_jet(dom, truth(x), p.input_dim());
    const double f = source_term(p, std::span<const double>(x.data(), sdim), t);
    worst = std::max(worst, std::abs(residual(p, dom, j, p.params.kappa, f)));
  }
  return worst;
}

double helmholtz_worst(double M, double a1, double a2, double kappa) {
  const ProblemSpec p = ProblemSpec::helmholtz(M, M, a1, a2, kappa);
  const double w1 = a1 * kPi, w2 = a2 * kPi;
  return worst_residual(p, 11, [=](std::span<const double> x) {
    const double sx = std::sin(w1 * x[0]), cx = std::cos(w1 * x[0]);
    const double sy = std::sin(w2 * x[1]), cy = std::cos(w2 * x[1]);
    return Analytic{sx * sy, {w1 * cx * sy, w2 * sx * cy, 0},
                    {-w1 * w1 * sx * sy, -w2 * w2 * sx * sy, 0}};
  });
}

Outcome residual_oracle() {
  constexpr double kTol = 1e-8;
  double worst = 0.0;
  std::string detail;
  for (double M : {2.0, 4.0, 6.0}) {
    const double D = 0.1;
    const ProblemSpec diff = ProblemSpec::diffusion(M, D);
    const double wd = worst_residual(diff, 1, [=](std::span<const double> x) {
      const double e = std::exp(-kPi * kPi * D * x[1]);
      const double s = std::sin(kPi * x[0]), c = std::cos(kPi * x[0]);
      return Analytic{s * e, {kPi * c * e, -kPi * kPi * D * s * e, 0},
                      {-kPi * kPi * s * e, 0, 0}};
    });
    const double wh = std::max(helmholtz_worst(M, 0.25, 1.0, 1.0),
                               helmholtz_worst(M, 1.0, 1.0, 1.0));
    const ProblemSpec rd = ProblemSpec::reaction_diffusion(M, 0.01, 0.7, false);
    const double wr = worst_residual(rd, 3, [](std::span<const double> x) {
      // u = s^3 with s = sin 6x, c = cos 6x
      const double s = std::sin(6 * x[0]), c = std::cos(6 * x[0]);
      return Analytic{s * s * s, {18 * s * s * c, 0, 0},
                      {36 * (6 * s * c * c - 3 * s * s * s), 0, 0}};
    });
    worst = std::max({worst, wd, wh, wr});
    detail += "M=" + std::to_string(static_cast<int>(M)) + " diffusion " + sci(wd) +
              " helmholtz " + sci(wh) + " reaction-diffusion " + sci(wr) + "; ";
  }
  return {worst < kTol, detail + "worst " + sci(worst)};
}

// ---------------------------------------------------------------------------
// 3. Parameter counts

Outcome parameter_counts() {
  struct Row {
    const char* label;
    std::size_t got, want;
  };
  const Row rows[] = {
      {"cKAN (4,8,3)", CkanArchitecture::from_shape(2, 4, 8, 3).parameter_count(), 864},
      {"cKAN (4,25,3)", CkanArchitecture::from_shape(2, 4, 25, 3).parameter_count(), 7800},
      {"MLP (4,50)", MlpArchitecture::from_shape(2, 4, 50).parameter_count(), 7850},
      {"cKAN (4,15,3)", CkanArchitecture::from_shape(2, 4, 15, 3).parameter_count(), 2880},
      {"MLP (4,30)", MlpArchitecture::from_shape(2, 4, 30).parameter_count(), 2911},
      {"cKAN (4,20,5)", CkanArchitecture::from_shape(2, 4, 20, 5).parameter_count(), 7560},
      {"cKAN (4,8,5) 1-D", CkanArchitecture::from_shape(1, 4, 8, 5).parameter_count(), 1248},
  };
  bool pass = true;
  std::string detail;
  for (const Row& r : rows) {
    const bool ok = r.got == r.want;
    pass = pass && ok;
    detail += std::string(r.label) + " " + std::to_string(r.got) +
              (ok ? "" : " (expected " + std::to_string(r.want) + ")") + "; ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 4. Diffusion at M = 2

Outcome diffusion_m2() {
  constexpr double kTol = 1.5e-2;
  ExperimentConfig c = config("diffusion.yaml");
  c.problem = ProblemSpec::diffusion(2.0, 0.1);
  const ExperimentResult r = run_experiment(c, work_dir("c4"));
  const double re = r.re_u.value_or(INFINITY);
  return {r.status == TrainingStatus::Ok && re <= kTol,
          "RE " + sci(re) + " after " + std::to_string(r.epochs_run) + " epochs, " +
              sci(r.wall_seconds) + " s"};
}

// ---------------------------------------------------------------------------
// 5. Scaling beats no scaling at M = 6

Outcome scaling_ordering() {
  constexpr double kFactor = 5.0;
  std::string detail;
  for (std::uint64_t seed : {1u, 2u}) {
    double re[3];
    const Method methods[3] = {Method::ScaledCkan, Method::Ckan, Method::Mlp};
    for (int i = 0; i < 3; ++i) {
      ExperimentConfig c = config("diffusion.yaml");
      c.problem = ProblemSpec::diffusion(6.0, 0.1);
      c.method = methods[i];
      c.seed = seed;
      c.name = "diffusion_M6_" + to_string(methods[i]);
      const ExperimentResult r = run_experiment(c, work_dir("c5_" + c.name));
      re[i] = r.re_u.value_or(INFINITY);
    }
    const bool pass = kFactor * re[0] <= re[1] && kFactor * re[0] <= re[2];
    detail += "seed " + std::to_string(seed) + ": scaled_ckan " + sci(re[0]) + ", ckan " +
              sci(re[1]) + ", mlp " + sci(re[2]) + "; ";
    if (pass) return {true, detail};
  }
  return {false, detail};
}

// ---------------------------------------------------------------------------
// 6 and 7. Inverse reaction-diffusion

ExperimentResult inverse_run(Method m, double du, double df) {
  ExperimentConfig c = config("reaction_diffusion_inverse.yaml");
  c.method = m;
  c.noise = {du, df};
  c.name = "inverse_" + to_string(m) + "_" + sci(du) + "_" + sci(df);
  return run_experiment(c, work_dir(c.name));
}

Outcome inverse_noiseless() {
  constexpr double kTolKappa = 1e-2, kTolU = 5e-2;
  const ExperimentResult r = inverse_run(Method::ScaledCkan, 0.0, 0.0);
  const double ek = r.re_kappa.value_or(INFINITY), eu = r.re_u.value_or(INFINITY);
  return {ek <= kTolKappa && eu <= kTolU,
          "kappa " + sci(r.kappa.value_or(NAN)) + " (rel. err " + sci(ek) + "), RE(u) " +
              sci(eu) + ", " + sci(r.wall_seconds) + " s"};
}

Outcome inverse_noisy() {
  constexpr double kTolKappa = 5e-2, kLossBound = 1e-2;
  const ExperimentResult s = inverse_run(Method::ScaledCkan, 0.05, 0.05);
  const double ek = s.re_kappa.value_or(INFINITY);
  bool pass = ek <= kTolKappa && s.final_loss.total < kLossBound;
  std::string detail = "scaled_ckan kappa rel. err " + sci(ek) + ", final loss " +
                       sci(s.final_loss.total);
  for (Method m : {Method::ScaledMlp, Method::Ckan, Method::Mlp}) {
    const ExperimentResult r = inverse_run(m, 0.05, 0.05);
    pass = pass && r.final_loss.total > kLossBound;
    detail += "; " + to_string(m) + " final loss " + sci(r.final_loss.total);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 8. Helmholtz and Allen-Cahn substitutes

// Max-norm error at T of the reference stepper against a manufactured
// solution, with a time step small enough that the spatial error dominates.
double spatial_error(int intervals) {
  ReactionDiffusion1d s;
  s.half_width = 1.0;
  s.final_time = 0.5;
  s.diffusion = 0.1;
  s.reaction = 5.0;
  s.initial = [](double x) { return std::sin(kPi * x / 2); };
  s.left = [](double t) { return -std::cos(t); };
  s.right = [](double t) { return std::cos(t); };
  s.source = [](double x, double t) {
    const double u = std::cos(t) * std::sin(kPi * x / 2);
    const double ut = -std::sin(t) * std::sin(kPi * x / 2);
    return ut + 0.1 * kPi * kPi / 4 * u + 5.0 * (u * u * u - u);
  };
  const GridSolution g = solve_reaction_diffusion_1d(s, {intervals, 4000, 4000});
  const std::size_t last = g.t().size() - 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.x().size(); ++i) {
    const double exact = std::cos(g.t()[last]) * std::sin(kPi * g.x()[i] / 2);
    worst = std::max(worst, std::abs(g.at_node(last, i) - exact));
  }
  return worst;
}

Outcome substitutes() {
  constexpr double kTolResidual = 1e-8;
  constexpr double kRatio = 4.0, kRatioSlack = 0.3;  // second order
  constexpr double kTolRe = 2e-1;
  constexpr int kWindow = 10;  // logged entries per averaging window

  // (a) Helmholtz residual oracle
  double wh = 0.0;
  for (double M : {2.0, 4.0, 6.0}) {
    wh = std::max({wh, helmholtz_worst(M, 0.25, 1.0, 1.0), helmholtz_worst(M, 1.0, 1.0, 1.0)});
  }
  const bool a = wh < kTolResidual;

  // (b) spatial order of the reference solver
  const double e1 = spatial_error(16), e2 = spatial_error(32), e3 = spatial_error(64);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const auto in_band = [&](double r) {
    return std::abs(r - kRatio) <= kRatioSlack * kRatio;
  };
  const bool b = in_band(r1) && in_band(r2);

  // (c) supervised Allen-Cahn at a tenth of the epoch budget
  ExperimentConfig c = config("allen_cahn_supervised.yaml");
  c.training.epochs = (c.training.epochs + 9) / 10;
  c.training.log_interval = 10;
  const fs::path dir = work_dir("c8_allen_cahn");
  const ExperimentResult r = run_experiment(c, dir);
  const CsvTable h = read_csv(dir / "history.csv");
  const auto total_col = std::find(h.header.begin(), h.header.end(), "total") - h.header.begin();
  std::vector<double> windows;
  for (std::size_t i = 0; i + kWindow <= h.rows.size(); i += kWindow) {
    double sum = 0.0;
    for (int k = 0; k < kWindow; ++k) sum += std::stod(h.rows[i + k][total_col]);
    windows.push_back(sum / kWindow);
  }
  bool monotone = windows.size() >= 2;
  for (std::size_t i = 1; i < windows.size(); ++i) monotone = monotone && windows[i] <= windows[i - 1];
  const double re = r.re_u.value_or(INFINITY);
  const bool cc = r.status == TrainingStatus::Ok && re <= kTolRe && monotone;

  return {a && b && cc,
          "(a) Helmholtz worst residual " + sci(wh) + (a ? " ok" : " FAIL") +
              "; (b) error ratios " + sci(r1) + ", " + sci(r2) + (b ? " ok" : " FAIL") +
              "; (c) Allen-Cahn " + std::to_string(c.training.epochs) + " epochs RE " +
              sci(re) + ", windowed loss " + (monotone ? "monotone" : "NOT monotone") +
              " over " + std::to_string(windows.size()) + " windows" + (cc ? " ok" : " FAIL")};
}

// ---------------------------------------------------------------------------
// 9. Determinism

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  bool pass = true;
  std::string detail;
  const std::pair<const char*, int> cases[] = {
      {"diffusion.yaml", 1}, {"diffusion.yaml", 3}, {"reaction_diffusion_inverse.yaml", 2}};
  for (const auto& [file, threads] : cases) {
    ExperimentConfig c = config(file);
    c.training.epochs = 300;
    c.training.log_interval = 10;
    c.threads = threads;
    const fs::path base = work_dir(std::string("c9_") + file + std::to_string(threads));
    run_experiment(c, base / "a");
    run_experiment(c, base / "b");
    const std::string x = slurp(base / "a" / "history.csv");
    const bool same = !x.empty() && x == slurp(base / "b" / "history.csv");
    pass = pass && same;
    detail += std::string(file) + " threads=" + std::to_string(threads) +
              (same ? " identical" : " DIFFERENT") + "; ";
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"derivatives vs finite differences", derivatives},
      {"residual oracle, M in {2,4,6}", residual_oracle},
      {"parameter counts", parameter_counts},
      {"diffusion M=2 accuracy", diffusion_m2},
      {"scaling ordering at M=6", scaling_ordering},
      {"inverse reaction-diffusion, noiseless", inverse_noiseless},
      {"inverse reaction-diffusion, noisy", inverse_noisy},
      {"Helmholtz / Allen-Cahn substitutes", substitutes},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("CRITERION %d %s: %s [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
