#include "cpikan/pde_problems.hpp"

#include "json.hpp"

#include <fstream>
#include <random>

#include "cpikan/csv.hpp"

namespace cpikan {

namespace {

constexpr double kPi = std::numbers::pi;

// Independent RNG stream per point class so that changing one count does not
// reshuffle the others.
enum Stream : std::uint32_t {
  kResidual = 1,
  kInitial,
  kBoundary,
  kMeasurement,
  kNoiseU,
  kNoiseF
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
  auto rng = make_rng(seed, stream);
  return rng();
}

double sin3_6x(double x) {
  const double s = std::sin(6.0 * x);
  return s * s * s;
}

// d^2/dx^2 sin^3(6x) = 108 sin(6x) (2 cos^2(6x) - sin^2(6x))
double sin3_6x_xx(double x) {
  const double s = std::sin(6.0 * x);
  const double c = std::cos(6.0 * x);
  return 108.0 * s * (2.0 * c * c - s * s);
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Diffusion: return "diffusion";
    case ProblemKind::Helmholtz2D: return "helmholtz";
    case ProblemKind::AllenCahn: return "allen_cahn";
    case ProblemKind::ReactionDiffusion: return "reaction_diffusion";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "diffusion") return ProblemKind::Diffusion;
  if (name == "helmholtz") return ProblemKind::Helmholtz2D;
  if (name == "allen_cahn" || name == "allen-cahn") return ProblemKind::AllenCahn;
  if (name == "reaction_diffusion" || name == "reaction-diffusion") {
    return ProblemKind::ReactionDiffusion;
  }
  throw std::invalid_argument("unknown problem kind '" + name + "'");
}

ProblemSpec ProblemSpec::diffusion(double half_width, double diffusion,
                                   double final_time) {
  ProblemSpec p;
  p.kind = ProblemKind::Diffusion;
  p.params.diffusion = diffusion;
  p.half_widths = {half_width};
  p.final_time = final_time;
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::helmholtz(double half_width_x, double half_width_y,
                                   double a1, double a2, double kappa) {
  ProblemSpec p;
  p.kind = ProblemKind::Helmholtz2D;
  p.params.kappa = kappa;
  p.params.a1 = a1;
  p.params.a2 = a2;
  p.half_widths = {half_width_x, half_width_y};
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::allen_cahn(double half_width, double diffusion,
                                    double final_time) {
  ProblemSpec p;
  p.kind = ProblemKind::AllenCahn;
  p.params.diffusion = diffusion;
  p.half_widths = {half_width};
  p.final_time = final_time;
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::reaction_diffusion(double half_width, double diffusion,
                                            double kappa, bool inverse) {
  ProblemSpec p;
  p.kind = ProblemKind::ReactionDiffusion;
  p.params.diffusion = diffusion;
  p.params.kappa = kappa;
  p.half_widths = {half_width};
  p.inverse = inverse;
  p.validate();
  return p;
}

std::vector<std::string> ProblemSpec::coordinate_names() const {
  if (kind == ProblemKind::Helmholtz2D) return {"x", "y"};
  if (time_dependent()) return {"x", "t"};
  return {"x"};
}

void ProblemSpec::validate() const {
  const int expected = kind == ProblemKind::Helmholtz2D ? 2 : 1;
  if (spatial_dim() != expected) {
    throw std::invalid_argument(to_string(kind) + ": expected " +
                                std::to_string(expected) + " spatial axes");
  }
  for (double m : half_widths) {
    if (!(m > 0.0)) {
      throw std::invalid_argument(to_string(kind) +
                                  ": half width must be positive");
    }
  }
  if (time_dependent() && !(final_time > 0.0)) {
    throw std::invalid_argument(to_string(kind) +
                                ": final time must be positive");
  }
  if (inverse && kind != ProblemKind::ReactionDiffusion) {
    throw std::invalid_argument(to_string(kind) +
                                ": inverse mode is only defined for "
                                "reaction_diffusion");
  }
  if ((kind == ProblemKind::Diffusion || kind == ProblemKind::AllenCahn) &&
      params.diffusion < 0.0) {
    throw std::invalid_argument(to_string(kind) +
                                ": diffusion coefficient must be >= 0");
  }
}

double initial_value(const ProblemSpec& p, std::span<const double> x) {
  switch (p.kind) {
    case ProblemKind::Diffusion: return std::sin(kPi * x[0]);
    case ProblemKind::AllenCahn: {
      const double r = x[0] / p.half_widths[0];
      return r * r * std::cos(kPi * r);
    }
    default:
      throw std::invalid_argument(to_string(p.kind) +
                                  " has no initial condition");
  }
}

double boundary_value(const ProblemSpec& p, std::span<const double> x,
                      double /*t*/) {
  switch (p.kind) {
    case ProblemKind::Diffusion: return 0.0;
    case ProblemKind::Helmholtz2D: return 0.0;
    case ProblemKind::AllenCahn: return -1.0;
    case ProblemKind::ReactionDiffusion: return sin3_6x(x[0]);
  }
  return 0.0;
}

double source_term(const ProblemSpec& p, std::span<const double> x,
                   double /*t*/) {
  switch (p.kind) {
    case ProblemKind::Diffusion:
    case ProblemKind::AllenCahn:
      return 0.0;
    case ProblemKind::Helmholtz2D: {
      const auto& q = p.params;
      return (q.kappa * q.kappa - (q.a1 * q.a1 + q.a2 * q.a2) * kPi * kPi) *
             std::sin(q.a1 * kPi * x[0]) * std::sin(q.a2 * kPi * x[1]);
    }
    case ProblemKind::ReactionDiffusion:
      return p.params.diffusion * sin3_6x_xx(x[0]) +
             p.params.kappa * std::tanh(sin3_6x(x[0]));
  }
  return 0.0;
}

std::optional<double> exact_solution(const ProblemSpec& p,
                                     std::span<const double> x, double t) {
  switch (p.kind) {
    case ProblemKind::Diffusion:
      return std::sin(kPi * x[0]) *
             std::exp(-kPi * kPi * p.params.diffusion * t);
    case ProblemKind::Helmholtz2D:
      return std::sin(p.params.a1 * kPi * x[0]) *
             std::sin(p.params.a2 * kPi * x[1]);
    case ProblemKind::ReactionDiffusion:
      return sin3_6x(x[0]);
    case ProblemKind::AllenCahn:
      return std::nullopt;
  }
  return std::nullopt;
}

void PointSet::push(std::span<const double> x, double target) {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("PointSet: dimension mismatch");
  }
  coords.insert(coords.end(), x.begin(), x.end());
  targets.push_back(target);
}

std::vector<double> add_noise(std::span<const double> values, double delta,
                              std::uint64_t seed) {
  if (delta < 0.0 || !std::isfinite(delta)) {
    throw std::invalid_argument("add_noise: delta must be finite and >= 0");
  }
  std::vector<double> out(values.begin(), values.end());
  if (delta == 0.0) return out;
  auto rng = make_rng(seed, 0x6e6f6973u);
  std::normal_distribution<double> dist(0.0, delta);
  for (double& v : out) v += dist(rng);
  return out;
}

TrainingSet sample_training_set(const ProblemSpec& p,
                                const ScaledDomain& domain,
                                const PointCounts& counts, std::uint64_t seed,
                                const NoiseSpec& noise, const FieldFn& truth) {
  p.validate();
  if (counts.residual < 0 || counts.initial < 0 || counts.boundary < 0 ||
      counts.measurement < 0) {
    throw std::invalid_argument("sample_training_set: counts must be >= 0");
  }
  if (counts.initial > 0 && !p.time_dependent()) {
    throw std::invalid_argument(to_string(p.kind) +
                                ": initial points requested for a steady problem");
  }
  if (static_cast<int>(domain.spatial_dim()) != p.spatial_dim()) {
    throw std::invalid_argument("sample_training_set: domain dimension mismatch");
  }
  FieldFn measure = truth;
  if (!measure && counts.measurement > 0) {
    if (!exact_solution(p, std::vector<double>(p.spatial_dim(), 0.0), 0.0)) {
      throw std::invalid_argument(
          to_string(p.kind) +
          ": measurement points need a ground-truth field");
    }
    measure = [&p](std::span<const double> x, double t) {
      return *exact_solution(p, x, t);
    };
  }

  const int sdim = p.spatial_dim();
  const int dim = p.input_dim();
  const bool timed = p.time_dependent();
  const double T = p.final_time;

  TrainingSet set;
  for (PointSet* s : {&set.residual, &set.initial, &set.boundary,
                      &set.measurement}) {
    s->dim = dim;
  }
  set.noise = {noise.delta_u, noise.delta_f, seed};

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, T);
  std::vector<double> phys(sdim), net(dim);

  // Draws a physical point and its network coordinates.
  auto place = [&](std::mt19937_64& rng, double t, int fixed_axis,
                   double fixed_value) {
    for (int a = 0; a < sdim; ++a) {
      phys[a] = a == fixed_axis ? fixed_value
                                : p.half_widths[a] * unit(rng);
      net[a] = domain.axis_to_reference(a, phys[a]);
    }
    if (timed) net[sdim] = t;
  };

  {
    auto rng = make_rng(seed, kResidual);
    std::vector<double> f;
    f.reserve(counts.residual);
    for (int n = 0; n < counts.residual; ++n) {
      place(rng, 0.0, -1, 0.0);
      const double t = timed ? time(rng) : 0.0;
      if (timed) net[sdim] = t;
      set.residual.push(net, 0.0);
      f.push_back(source_term(p, phys, t));
    }
    set.residual.targets =
        add_noise(f, noise.delta_f, derive_seed(seed, kNoiseF));
  }
  {
    auto rng = make_rng(seed, kInitial);
    for (int n = 0; n < counts.initial; ++n) {
      place(rng, 0.0, -1, 0.0);
      set.initial.push(net, initial_value(p, phys));
    }
  }
  {
    auto rng = make_rng(seed, kBoundary);
    const int faces = 2 * sdim;
    for (int n = 0; n < counts.boundary; ++n) {
      const int face = n % faces;
      const int axis = face / 2;
      const double side = (face % 2 == 0) ? -1.0 : 1.0;
      place(rng, 0.0, axis, side * p.half_widths[axis]);
      const double t = timed ? time(rng) : 0.0;
      if (timed) net[sdim] = t;
      set.boundary.push(net, boundary_value(p, phys, t));
    }
  }
  {
    auto rng = make_rng(seed, kMeasurement);
    std::vector<double> u;
    u.reserve(counts.measurement);
    for (int n = 0; n < counts.measurement; ++n) {
      place(rng, 0.0, -1, 0.0);
      const double t = timed ? time(rng) : 0.0;
      if (timed) net[sdim] = t;
      set.measurement.push(net, 0.0);
      u.push_back(measure(phys, t));
    }
    set.measurement.targets =
        add_noise(u, noise.delta_u, derive_seed(seed, kNoiseU));
  }
  return set;
}

// ---------------------------------------------------------------------------
// CSV exchange

void write_point_set_csv(const PointSet& set,
                         const std::vector<std::string>& coordinate_names,
                         const std::filesystem::path& file) {
  if (static_cast<int>(coordinate_names.size()) != set.dim) {
    throw std::invalid_argument("write_point_set_csv: name count mismatch");
  }
  CsvWriter w(file);
  auto header = coordinate_names;
  header.push_back("target");
  w.header(header);
  std::vector<double> row(set.dim + 1);
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto x = set.point(i);
    std::copy(x.begin(), x.end(), row.begin());
    row.back() = set.targets[i];
    w.row(row);
  }
}

PointSet read_point_set_csv(const std::filesystem::path& file) {
  const CsvTable table = read_csv(file);
  if (table.header.empty() || table.header.back() != "target") {
    throw std::runtime_error("point set csv: last column must be 'target' in " +
                             file.string());
  }
  PointSet set;
  set.dim = static_cast<int>(table.header.size()) - 1;
  std::vector<double> x(set.dim);
  for (const auto& row : table.rows) {
    for (int c = 0; c < set.dim; ++c) x[c] = std::stod(row[c]);
    set.push(x, std::stod(row.back()));
  }
  return set;
}

void export_training_set(const TrainingSet& set,
                         const std::vector<std::string>& coordinate_names,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_point_set_csv(set.residual, coordinate_names, dir / "residual.csv");
  write_point_set_csv(set.initial, coordinate_names, dir / "initial.csv");
  write_point_set_csv(set.boundary, coordinate_names, dir / "boundary.csv");
  write_point_set_csv(set.measurement, coordinate_names,
                      dir / "measurement.csv");
  nlohmann::json noise = {{"delta_u", set.noise.delta_u},
                          {"delta_f", set.noise.delta_f},
                          {"seed", set.noise.seed}};
  std::ofstream(dir / "noise.json") << noise.dump(2) << '\n';
}

TrainingSet import_training_set(const std::filesystem::path& dir) {
  TrainingSet set;
  set.residual = read_point_set_csv(dir / "residual.csv");
  set.initial = read_point_set_csv(dir / "initial.csv");
  set.boundary = read_point_set_csv(dir / "boundary.csv");
  set.measurement = read_point_set_csv(dir / "measurement.csv");
  if (std::filesystem::exists(dir / "noise.json")) {
    std::ifstream in(dir / "noise.json");
    const auto j = nlohmann::json::parse(in);
    set.noise = {j.at("delta_u").get<double>(), j.at("delta_f").get<double>(),
                 j.at("seed").get<std::uint64_t>()};
  }
  return set;
}

}  // namespace cpikan
