#include "cpikan/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "cpikan/csv.hpp"
#include "cpikan/evaluation.hpp"
#include "json.hpp"

namespace cpikan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::ScaledCkan: return "scaled_ckan";
    case Method::ScaledMlp: return "scaled_mlp";
    case Method::Ckan: return "ckan";
    case Method::Mlp: return "mlp";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::ScaledCkan, Method::ScaledMlp, Method::Ckan,
                   Method::Mlp}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument(
      "method: unknown value '" + name +
      "' (expected scaled_ckan, scaled_mlp, ckan or mlp)");
}

bool is_scaled(Method m) {
  return m == Method::ScaledCkan || m == Method::ScaledMlp;
}

bool is_kan(Method m) { return m == Method::ScaledCkan || m == Method::Ckan; }

// ---------------------------------------------------------------------------
// validation

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

void require_nonnegative(const std::string& field, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "must be a finite value >= 0 (got " << v << ")";
    field_error(field, os.str());
  }
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "must be > 0 (got " << v << ")";
    field_error(field, os.str());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) field_error("name", "must not be empty");
  for (char c : name) {
    if (c == '/' || c == '\\') field_error("name", "must not contain path separators");
  }
  try {
    problem.validate();
  } catch (const std::invalid_argument& e) {
    field_error("problem", e.what());
  }

  const NetworkShape& s = is_kan(method) ? ckan : mlp;
  const std::string net = is_kan(method) ? "network.ckan" : "network.mlp";
  if (s.hidden_layers < 1) field_error(net + ".hidden_layers", "must be >= 1");
  if (s.width < 1) field_error(net + ".width", "must be >= 1");
  if (is_kan(method) && s.degree < 1) field_error(net + ".degree", "must be >= 1");

  require_nonnegative("weights.lambda_res", weights.res);
  require_nonnegative("weights.lambda_data", weights.data);
  require_nonnegative("weights.lambda_init", weights.init);
  require_nonnegative("weights.lambda_bc", weights.bc);
  require_nonnegative("weights.lambda_meas", weights.meas);

  const std::pair<const char*, int> counts[] = {
      {"points.N_res", points.residual},
      {"points.N_init", points.initial},
      {"points.N_bc", points.boundary},
      {"points.N_meas", points.measurement}};
  for (const auto& [field, n] : counts) {
    if (n < 0) {
      field_error(field, "must be >= 0 (got " + std::to_string(n) + ")");
    }
  }
  auto need = [](const char* field, int n, double w, const char* weight) {
    if (w > 0.0 && n == 0) {
      field_error(field, std::string("must be > 0 when ") + weight + " > 0");
    }
  };
  need("points.N_res", points.residual, weights.res, "weights.lambda_res");
  need("points.N_init", points.initial, weights.data * weights.init,
       "weights.lambda_init");
  need("points.N_bc", points.boundary, weights.data * weights.bc,
       "weights.lambda_bc");
  need("points.N_meas", points.measurement, weights.data * weights.meas,
       "weights.lambda_meas");
  if (points.initial > 0 && !problem.time_dependent()) {
    field_error("points.N_init", "must be 0 for a steady problem");
  }
  if (problem.inverse && points.measurement == 0) {
    field_error("points.N_meas", "inverse mode needs measurement points");
  }

  require_nonnegative("noise.delta_u", noise.delta_u);
  require_nonnegative("noise.delta_f", noise.delta_f);

  if (training.epochs < 0) field_error("training.epochs", "must be >= 0");
  require_positive("training.learning_rate", training.learning_rate);
  if (!(training.beta1 >= 0.0 && training.beta1 < 1.0)) {
    field_error("training.beta1", "must lie in [0, 1)");
  }
  if (!(training.beta2 >= 0.0 && training.beta2 < 1.0)) {
    field_error("training.beta2", "must lie in [0, 1)");
  }
  require_positive("training.epsilon", training.epsilon);
  if (training.log_interval < 1) field_error("training.log_interval", "must be >= 1");
  if (training.checkpoint_interval < 0) {
    field_error("training.checkpoint_interval", "must be >= 0");
  }
  if (threads < 1) field_error("threads", "must be >= 1");
  if (reference) {
    if (problem.kind != ProblemKind::AllenCahn) {
      field_error("reference", "only applies to allen_cahn");
    }
    if (reference->grid.intervals < 2) field_error("reference.intervals", "must be >= 2");
    if (reference->grid.steps < 1) field_error("reference.steps", "must be >= 1");
    if (reference->grid.store_every < 1) {
      field_error("reference.store_every", "must be >= 1");
    }
  }
}

Architecture ExperimentConfig::architecture() const {
  const int in = problem.input_dim();
  if (is_kan(method)) {
    return CkanArchitecture::from_shape(in, ckan.hidden_layers, ckan.width,
                                        ckan.degree);
  }
  return MlpArchitecture::from_shape(in, mlp.hidden_layers, mlp.width);
}

ScaledDomain ExperimentConfig::domain() const {
  return is_scaled(method)
             ? ScaledDomain::scaled(problem.half_widths, problem.final_time)
             : ScaledDomain::unscaled(problem.half_widths, problem.final_time);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) {
    field_error(where.empty() ? "config" : where, "must be a mapping");
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      field_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& where,
          T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    field_error(where.empty() ? key : where + "." + key, "has the wrong type");
  }
}

ProblemSpec parse_problem(const YAML::Node& n) {
  if (!n) field_error("problem", "is required");
  check_keys(n, "problem",
             {"kind", "M", "Mx", "My", "D", "kappa", "a1", "a2", "final_time",
              "inverse", "kappa_init"});
  std::string kind_name;
  read(n, "kind", "problem", kind_name);
  if (kind_name.empty()) field_error("problem.kind", "is required");
  ProblemKind kind;
  try {
    kind = problem_kind_from_string(kind_name);
  } catch (const std::exception&) {
    field_error("problem.kind", "unknown value '" + kind_name + "'");
  }
  double M = 1.0, Mx = -1.0, My = -1.0, D = 0.0, kappa = 0.0, a1 = 0.0,
         a2 = 0.0, T = 1.0, kappa_init = 0.0;
  bool inverse = false;
  read(n, "M", "problem", M);
  read(n, "Mx", "problem", Mx);
  read(n, "My", "problem", My);
  read(n, "D", "problem", D);
  read(n, "kappa", "problem", kappa);
  read(n, "a1", "problem", a1);
  read(n, "a2", "problem", a2);
  read(n, "final_time", "problem", T);
  read(n, "inverse", "problem", inverse);
  read(n, "kappa_init", "problem", kappa_init);
  if (!(M > 0.0)) field_error("problem.M", "must be > 0");

  ProblemSpec p;
  p.kind = kind;
  p.params.diffusion = D;
  p.params.kappa = kappa;
  p.params.a1 = a1;
  p.params.a2 = a2;
  p.inverse = inverse;
  p.kappa_init = kappa_init;
  if (kind == ProblemKind::Helmholtz2D) {
    p.half_widths = {Mx > 0 ? Mx : M, My > 0 ? My : M};
  } else {
    if (n["Mx"] || n["My"]) field_error("problem.Mx", "only applies to helmholtz");
    p.half_widths = {M};
  }
  p.final_time = p.time_dependent() ? T : 0.0;
  if (p.time_dependent() && !(T > 0.0)) {
    field_error("problem.final_time", "must be > 0");
  }
  if (!std::isfinite(kappa_init)) field_error("problem.kappa_init", "must be finite");
  return p;
}

NetworkShape parse_shape(const YAML::Node& n, const std::string& where) {
  check_keys(n, where, {"hidden_layers", "width", "degree"});
  NetworkShape s;
  read(n, "hidden_layers", where, s.hidden_layers);
  read(n, "width", where, s.width);
  read(n, "degree", where, s.degree);
  return s;
}

ExperimentConfig parse_node(const YAML::Node& root) {
  if (!root || root.IsNull()) field_error("config", "is empty");
  check_keys(root, "",
             {"name", "method", "seed", "deterministic", "threads",
              "output_dir", "problem", "network", "weights", "points", "noise",
              "training", "reference"});
  ExperimentConfig c;
  read(root, "name", "", c.name);
  std::string method = to_string(c.method);
  read(root, "method", "", method);
  c.method = method_from_string(method);
  read(root, "seed", "", c.seed);
  read(root, "deterministic", "", c.deterministic);
  read(root, "threads", "", c.threads);
  read(root, "output_dir", "", c.output_dir);
  c.problem = parse_problem(root["problem"]);

  if (const YAML::Node net = root["network"]) {
    check_keys(net, "network", {"ckan", "mlp"});
    if (net["ckan"]) c.ckan = parse_shape(net["ckan"], "network.ckan");
    if (net["mlp"]) c.mlp = parse_shape(net["mlp"], "network.mlp");
  }
  if (const YAML::Node w = root["weights"]) {
    check_keys(w, "weights",
               {"lambda_res", "lambda_data", "lambda_init", "lambda_bc",
                "lambda_meas"});
    read(w, "lambda_res", "weights", c.weights.res);
    read(w, "lambda_data", "weights", c.weights.data);
    read(w, "lambda_init", "weights", c.weights.init);
    read(w, "lambda_bc", "weights", c.weights.bc);
    read(w, "lambda_meas", "weights", c.weights.meas);
  }
  if (const YAML::Node pts = root["points"]) {
    check_keys(pts, "points", {"N_res", "N_init", "N_bc", "N_meas"});
    read(pts, "N_res", "points", c.points.residual);
    read(pts, "N_init", "points", c.points.initial);
    read(pts, "N_bc", "points", c.points.boundary);
    read(pts, "N_meas", "points", c.points.measurement);
  }
  if (const YAML::Node nz = root["noise"]) {
    check_keys(nz, "noise", {"delta_u", "delta_f"});
    read(nz, "delta_u", "noise", c.noise.delta_u);
    read(nz, "delta_f", "noise", c.noise.delta_f);
  }
  if (const YAML::Node t = root["training"]) {
    check_keys(t, "training",
               {"epochs", "learning_rate", "beta1", "beta2", "epsilon",
                "log_interval", "checkpoint_interval"});
    read(t, "epochs", "training", c.training.epochs);
    read(t, "learning_rate", "training", c.training.learning_rate);
    read(t, "beta1", "training", c.training.beta1);
    read(t, "beta2", "training", c.training.beta2);
    read(t, "epsilon", "training", c.training.epsilon);
    read(t, "log_interval", "training", c.training.log_interval);
    read(t, "checkpoint_interval", "training", c.training.checkpoint_interval);
  }
  if (const YAML::Node r = root["reference"]) {
    check_keys(r, "reference", {"intervals", "steps", "store_every", "verify"});
    ReferenceGridConfig ref;
    ref.grid = default_allen_cahn_grid(c.problem);
    read(r, "intervals", "reference", ref.grid.intervals);
    read(r, "steps", "reference", ref.grid.steps);
    read(r, "store_every", "reference", ref.grid.store_every);
    read(r, "verify", "reference", ref.verify);
    c.reference = ref;
  }
  c.validate();
  return c;
}

YAML::Node load_yaml_text(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
}

YAML::Node load_yaml_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_yaml_text(ss.str());
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  return parse_node(load_yaml_text(text));
}

ExperimentConfig load_config(const fs::path& file) {
  return parse_node(load_yaml_file(file));
}

std::string config_to_json(const ExperimentConfig& c) {
  json problem = {{"kind", to_string(c.problem.kind)}};
  if (c.problem.kind == ProblemKind::Helmholtz2D) {
    problem["Mx"] = c.problem.half_widths[0];
    problem["My"] = c.problem.half_widths[1];
    problem["a1"] = c.problem.params.a1;
    problem["a2"] = c.problem.params.a2;
    problem["kappa"] = c.problem.params.kappa;
  } else {
    problem["M"] = c.problem.half_widths[0];
    problem["D"] = c.problem.params.diffusion;
  }
  if (c.problem.kind == ProblemKind::ReactionDiffusion) {
    problem["kappa"] = c.problem.params.kappa;
    problem["inverse"] = c.problem.inverse;
    problem["kappa_init"] = c.problem.kappa_init;
  }
  if (c.problem.time_dependent()) problem["final_time"] = c.problem.final_time;

  json j = {
      {"name", c.name},
      {"method", to_string(c.method)},
      {"seed", c.seed},
      {"deterministic", c.deterministic},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
      {"problem", problem},
      {"network",
       {{"ckan",
         {{"hidden_layers", c.ckan.hidden_layers},
          {"width", c.ckan.width},
          {"degree", c.ckan.degree}}},
        {"mlp",
         {{"hidden_layers", c.mlp.hidden_layers}, {"width", c.mlp.width}}}}},
      {"weights",
       {{"lambda_res", c.weights.res},
        {"lambda_data", c.weights.data},
        {"lambda_init", c.weights.init},
        {"lambda_bc", c.weights.bc},
        {"lambda_meas", c.weights.meas}}},
      {"points",
       {{"N_res", c.points.residual},
        {"N_init", c.points.initial},
        {"N_bc", c.points.boundary},
        {"N_meas", c.points.measurement}}},
      {"noise", {{"delta_u", c.noise.delta_u}, {"delta_f", c.noise.delta_f}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"learning_rate", c.training.learning_rate},
        {"beta1", c.training.beta1},
        {"beta2", c.training.beta2},
        {"epsilon", c.training.epsilon},
        {"log_interval", c.training.log_interval},
        {"checkpoint_interval", c.training.checkpoint_interval}}}};
  if (c.reference) {
    j["reference"] = {{"intervals", c.reference->grid.intervals},
                      {"steps", c.reference->grid.steps},
                      {"store_every", c.reference->grid.store_every},
                      {"verify", c.reference->verify}};
  }
  return j.dump(2);
}

ExperimentConfig apply_overrides(ExperimentConfig c, const RunOverrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.deterministic) c.deterministic = *o.deterministic;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.threads) c.threads = *o.threads;
  if (o.epochs_scale) {
    if (!(*o.epochs_scale > 0.0)) {
      field_error("--epochs-scale", "must be > 0");
    }
    c.training.epochs =
        static_cast<int>(std::ceil(c.training.epochs * *o.epochs_scale));
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// running

namespace {

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text << '\n';
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::optional<fs::path> dir) {
  config.validate();
  const fs::path out = dir ? *dir : fs::path(config.output_dir) / config.name;
  fs::create_directories(out);
  write_text(out / "config.json", config_to_json(config));

  const ProblemSpec& problem = config.problem;
  const Architecture arch = config.architecture();
  const ScaledDomain domain = config.domain();

  FieldFn truth;
  if (problem.kind == ProblemKind::AllenCahn) {
    const ReferenceGridConfig ref =
        config.reference.value_or(
            ReferenceGridConfig{default_allen_cahn_grid(problem), true});
    auto solution = std::make_shared<GridSolution>(
        reference_solution(problem, ref.grid, ref.verify));
    truth = [solution](std::span<const double> x, double t) {
      return solution->at(x[0], t);
    };
  }

  const TrainingSet data = sample_training_set(problem, domain, config.points,
                                               config.seed, config.noise, truth);
  LossProblem lp{&problem, &domain, &data, config.weights};
  LossEvaluator evaluator(arch, lp, {config.threads, config.deterministic});
  NetworkParams init = init_params(arch, config.seed);

  const CheckpointFn save = [&](int epoch, const NetworkParams& params,
                                double kappa) {
    Checkpoint c{arch, params, std::nullopt, epoch};
    if (problem.inverse) c.kappa = kappa;
    write_checkpoint(out / ("checkpoint_" + std::to_string(epoch) + ".json"), c);
  };
  const TrainingRecord rec =
      problem.inverse
          ? train_inverse(evaluator, std::move(init), problem.kappa_init,
                          config.training, save)
          : train_forward(evaluator, std::move(init), config.training, save);

  write_history_csv(out / "history.csv", rec.history, problem.inverse);
  {
    Checkpoint c{arch, rec.params, std::nullopt, rec.epochs_run};
    if (problem.inverse) c.kappa = rec.kappa;
    write_checkpoint(out / "checkpoint.json", c);
  }

  ExperimentResult result;
  result.name = config.name;
  result.method = config.method;
  result.status = rec.status;
  result.diagnostic = rec.diagnostic;
  result.parameter_count = parameter_count(arch);
  result.final_loss = rec.final_loss;
  result.epochs_run = rec.epochs_run;
  result.wall_seconds = rec.wall_seconds;

  const TestGrid grid = make_test_grid(problem, truth);
  const std::vector<double> pred = predict(arch, rec.params, domain, grid);
  result.re_u = relative_l2(pred, grid.truth);
  if (problem.kind == ProblemKind::ReactionDiffusion) {
    const std::vector<double> f_pred =
        predict_source(problem, arch, rec.params, rec.kappa, domain, grid);
    std::vector<double> f_true;
    f_true.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f_true.push_back(source_term(problem, grid.point(i), 0.0));
    }
    result.re_f = relative_l2(f_pred, f_true);
  }
  if (problem.inverse) {
    result.kappa = rec.kappa;
    result.re_kappa = std::abs(rec.kappa - problem.params.kappa) /
                      std::abs(problem.params.kappa);
  }

  {
    CsvWriter w(out / "predictions.csv");
    std::vector<std::string> header = problem.coordinate_names();
    header.insert(header.end(), {"u_pred", "u_true", "abs_err"});
    w.header(header);
    std::vector<double> row;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto pt = grid.point(i);
      row.assign(pt.begin(), pt.end());
      row.insert(row.end(),
                 {pred[i], grid.truth[i], std::abs(pred[i] - grid.truth[i])});
      w.row(row);
    }
  }

  json summary = {
      {"name", result.name},
      {"method", to_string(result.method)},
      {"problem", to_string(problem.kind)},
      {"status", to_string(result.status)},
      {"diagnostic", result.diagnostic},
      {"parameter_count", result.parameter_count},
      {"relative_l2", optional_json(result.re_u)},
      {"relative_l2_f", optional_json(result.re_f)},
      {"kappa", optional_json(result.kappa)},
      {"kappa_true", problem.inverse ? json(problem.params.kappa) : json(nullptr)},
      {"kappa_relative_error", optional_json(result.re_kappa)},
      {"final_loss",
       {{"res", rec.final_loss.res},
        {"init", rec.final_loss.init},
        {"bc", rec.final_loss.bc},
        {"meas", rec.final_loss.meas},
        {"total", rec.final_loss.total}}},
      {"epochs_run", result.epochs_run},
      {"wall_seconds", result.wall_seconds}};
  write_text(out / "summary.json", summary.dump(2));
  return result;
}

// ---------------------------------------------------------------------------
// suites

namespace {

void merge_into(YAML::Node dst, const YAML::Node& src) {
  for (const auto& kv : src) {
    const std::string key = kv.first.as<std::string>();
    if (kv.second.IsMap() && dst[key] && dst[key].IsMap()) {
      merge_into(dst[key], kv.second);
    } else {
      dst[key] = YAML::Clone(kv.second);
    }
  }
}

void set_path(YAML::Node root, const std::string& dotted, const YAML::Node& v) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) {
    root[dotted] = YAML::Clone(v);
    return;
  }
  const std::string head = dotted.substr(0, dot);
  if (!root[head]) root[head] = YAML::Node(YAML::NodeType::Map);
  set_path(root[head], dotted.substr(dot + 1), v);
}

std::string label(const std::string& dotted, const YAML::Node& v) {
  const std::string leaf = dotted.substr(dotted.rfind('.') + 1);
  if (v.IsScalar()) {
    return leaf == "method" ? v.as<std::string>() : leaf + v.as<std::string>();
  }
  std::string s;
  if (v.IsMap()) {
    for (const auto& kv : v) {
      if (!s.empty()) s += "_";
      s += kv.first.as<std::string>() + kv.second.as<std::string>();
    }
  }
  return s;
}

YAML::Node resolve(const YAML::Node& n, const fs::path& base_dir) {
  if (n.IsScalar()) {
    fs::path p = n.as<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_yaml_file(p);
  }
  return YAML::Clone(n);
}

}  // namespace

std::vector<SuiteEntry> load_suite(const fs::path& manifest) {
  const YAML::Node root = load_yaml_file(manifest);
  std::vector<SuiteEntry> entries;
  if (!root || root.IsNull()) return entries;
  check_keys(root, "manifest", {"name", "base", "sweep", "experiments"});
  const fs::path dir = manifest.parent_path();

  YAML::Node base;
  if (root["base"]) base = resolve(root["base"], dir);
  std::string base_name;
  if (base && base["name"]) base_name = base["name"].as<std::string>();
  if (root["name"]) base_name = root["name"].as<std::string>();

  auto build = [&](YAML::Node node, const std::string& name) {
    SuiteEntry e;
    e.config.name = name;
    try {
      if (!name.empty()) node["name"] = name;
      e.config = parse_node(node);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    entries.push_back(std::move(e));
  };

  if (const YAML::Node sweep = root["sweep"]) {
    if (!base) field_error("manifest.sweep", "needs a base config");
    if (!sweep.IsMap()) field_error("manifest.sweep", "must be a mapping");
    std::vector<std::pair<std::string, std::vector<YAML::Node>>> axes;
    for (const auto& kv : sweep) {
      std::vector<YAML::Node> values;
      for (const auto& v : kv.second) values.push_back(v);
      if (values.empty()) return entries;
      axes.emplace_back(kv.first.as<std::string>(), std::move(values));
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    bool done = axes.empty();
    while (!done) {
      YAML::Node node = YAML::Clone(base);
      std::string name = base_name;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const YAML::Node& v = axes[a].second[idx[a]];
        set_path(node, axes[a].first, v);
        name += (name.empty() ? "" : "_") + label(axes[a].first, v);
      }
      build(node, name);
      // odometer: last axis varies fastest
      done = true;
      for (std::size_t a = axes.size(); a-- > 0;) {
        if (++idx[a] < axes[a].second.size()) {
          done = false;
          break;
        }
        idx[a] = 0;
      }
    }
  }

  if (const YAML::Node list = root["experiments"]) {
    std::size_t k = 0;
    for (const auto& item : list) {
      YAML::Node node;
      if (item.IsScalar()) {
        node = resolve(item, dir);
      } else {
        node = base ? YAML::Clone(base) : YAML::Node(YAML::NodeType::Map);
        merge_into(node, item);
      }
      std::string name = node["name"] ? node["name"].as<std::string>() : "";
      if (name.empty() || (item.IsMap() && !item["name"] && base)) {
        name = (base_name.empty() ? std::string("experiment") : base_name) +
               "_" + std::to_string(k);
      }
      build(node, name);
      ++k;
    }
  }
  return entries;
}

std::vector<SuiteRow> run_suite(const std::vector<SuiteEntry>& entries,
                                const RunOverrides& overrides,
                                const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<SuiteRow> rows;
  for (const SuiteEntry& e : entries) {
    SuiteRow row;
    row.name = e.config.name;
    row.method = to_string(e.config.method);
    if (!e.config.problem.half_widths.empty()) {
      for (double m : e.config.problem.half_widths) {
        row.half_width = std::max(row.half_width, m);
      }
    }
    row.delta_u = e.config.noise.delta_u;
    row.delta_f = e.config.noise.delta_f;
    if (!e.error.empty()) {
      row.status = "failed";
      row.message = e.error;
      rows.push_back(row);
      continue;
    }
    try {
      const ExperimentConfig c = apply_overrides(e.config, overrides);
      const ExperimentResult r = run_experiment(c, out_dir / c.name);
      row.status = to_string(r.status);
      row.parameter_count = r.parameter_count;
      row.re_u = r.re_u;
      row.re_f = r.re_f;
      row.re_kappa = r.re_kappa;
      row.final_loss = r.final_loss.total;
      row.message = r.diagnostic;
    } catch (const std::exception& ex) {
      row.status = "failed";
      row.message = ex.what();
    }
    rows.push_back(row);
  }
  write_suite_table(out_dir / "table.csv", rows);
  return rows;
}

void write_suite_table(const fs::path& file, const std::vector<SuiteRow>& rows) {
  CsvWriter w(file);
  w.header({"name", "method", "M", "delta_u", "delta_f", "status",
            "parameter_count", "re_u", "re_f", "re_kappa", "final_loss",
            "message"});
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  for (const SuiteRow& r : rows) {
    w.row(std::vector<std::string>{
        r.name, r.method, format_number(r.half_width), format_number(r.delta_u),
        format_number(r.delta_f), r.status, std::to_string(r.parameter_count),
        opt(r.re_u), opt(r.re_f), opt(r.re_kappa), opt(r.final_loss),
        r.message});
  }
}

}  // namespace cpikan
