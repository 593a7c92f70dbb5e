#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpikan/autodiff.hpp"
#include "cpikan/domain_scaling.hpp"

namespace cpikan {

enum class ProblemKind { Diffusion, Helmholtz2D, AllenCahn, ReactionDiffusion };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

/// Named PDE coefficients. Unused entries stay zero.
struct PdeParams {
  double diffusion = 0.0;  // D
  double kappa = 0.0;      // wave number (Helmholtz) or reaction coefficient
  double a1 = 0.0;
  double a2 = 0.0;
};

/// One benchmark problem on the physical box prod_i [-M_i, M_i] (x (0, T]
/// when time dependent).
///
///   diffusion          u_t - D u_xx = 0,            u(+-M,t) = 0, u(x,0) = sin(pi x)
///   helmholtz          u_xx + u_yy + k^2 u = f,     u = 0 on the boundary
///   allen_cahn         u_t - D u_xx + 5(u^3 - u) = 0, u(+-M,t) = -1,
///                      u(x,0) = (x/M)^2 cos(pi x / M)
///   reaction_diffusion D u_xx + k tanh(u) = f,      u = sin^3(6x) on the boundary
struct ProblemSpec {
  ProblemKind kind = ProblemKind::Diffusion;
  PdeParams params;
  std::vector<double> half_widths;
  double final_time = 0.0;  // zero for steady problems
  bool inverse = false;     // kappa is trainable
  double kappa_init = 0.0;

  static ProblemSpec diffusion(double half_width, double diffusion,
                               double final_time = 1.0);
  static ProblemSpec helmholtz(double half_width_x, double half_width_y,
                               double a1, double a2, double kappa);
  static ProblemSpec allen_cahn(double half_width, double diffusion,
                                double final_time = 1.0);
  static ProblemSpec reaction_diffusion(double half_width, double diffusion,
                                        double kappa, bool inverse = false);

  int spatial_dim() const { return static_cast<int>(half_widths.size()); }
  bool time_dependent() const {
    return kind == ProblemKind::Diffusion || kind == ProblemKind::AllenCahn;
  }
  /// Network input dimension: spatial axes followed by time.
  int input_dim() const { return spatial_dim() + (time_dependent() ? 1 : 0); }
  /// Number of trainable PDE parameters (1 in inverse mode, else 0).
  int trainable_count() const { return inverse ? 1 : 0; }
  std::vector<std::string> coordinate_names() const;

  void validate() const;
};

/// Physical-coordinate data of a problem.
double initial_value(const ProblemSpec& p, std::span<const double> x);
double boundary_value(const ProblemSpec& p, std::span<const double> x,
                      double t);
double source_term(const ProblemSpec& p, std::span<const double> x, double t);
/// Analytic solution; empty for Allen-Cahn.
std::optional<double> exact_solution(const ProblemSpec& p,
                                     std::span<const double> x, double t);

/// u(x, t) in physical coordinates.
using FieldFn = std::function<double(std::span<const double>, double)>;

/// Scaled residual N^s[u] - f at one point, from the network-coordinate jet
/// of u. Spatial derivative channels are converted with the domain's
/// chain-rule factors. `kappa` is a tape variable in inverse mode.
template <class S>
S residual(const ProblemSpec& p, const ScaledDomain& domain,
           const BasicJet<S>& u, const S& kappa, double source) {
  if (u.order != JetOrder::SecondOrder || u.dim != p.input_dim()) {
    throw std::invalid_argument(
        "residual: jet lacks the derivative channels of " + to_string(p.kind));
  }
  const double D = p.params.diffusion;
  switch (p.kind) {
    case ProblemKind::Diffusion: {
      const double fxx = D * domain.derivative_factor(0, 2);
      return u.d[1] - fxx * u.dd[0] - source;
    }
    case ProblemKind::Helmholtz2D: {
      const double fxx = domain.derivative_factor(0, 2);
      const double fyy = domain.derivative_factor(1, 2);
      return fxx * u.dd[0] + fyy * u.dd[1] + kappa * kappa * u.value - source;
    }
    case ProblemKind::AllenCahn: {
      const double fxx = D * domain.derivative_factor(0, 2);
      return u.d[1] - fxx * u.dd[0] + 5.0 * (u.value * u.value * u.value - u.value) -
             source;
    }
    case ProblemKind::ReactionDiffusion: {
      using std::tanh;
      const double fxx = D * domain.derivative_factor(0, 2);
      return fxx * u.dd[0] + kappa * tanh(u.value) - source;
    }
  }
  throw std::logic_error("residual: unknown problem kind");
}

/// Row-major point cloud in network coordinates with one target per point.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  bool empty() const { return targets.empty(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  void push(std::span<const double> x, double target);
};

struct PointCounts {
  int residual = 0;
  int initial = 0;
  int boundary = 0;
  int measurement = 0;
};

struct NoiseSpec {
  double delta_u = 0.0;  // measurement noise std-dev
  double delta_f = 0.0;  // source-term noise std-dev
};

struct NoiseRecord {
  double delta_u = 0.0;
  double delta_f = 0.0;
  std::uint64_t seed = 0;
};

/// Training data for one run. Residual targets are the (possibly noisy)
/// source values f(x, t) at the collocation points.
struct TrainingSet {
  PointSet residual;
  PointSet initial;
  PointSet boundary;
  PointSet measurement;
  NoiseRecord noise;
};

/// Uniform i.i.d. sampling: collocation and measurement points over the
/// interior (x (0, T)), initial points at t = 0, boundary points cycling over
/// the faces (x (0, T)). `truth` supplies measurement targets; defaults to
/// the analytic solution. Deterministic in `seed`.
TrainingSet sample_training_set(const ProblemSpec& p,
                                const ScaledDomain& domain,
                                const PointCounts& counts, std::uint64_t seed,
                                const NoiseSpec& noise = {},
                                const FieldFn& truth = {});

/// values + N(0, delta^2) noise; delta == 0 returns values unchanged.
std::vector<double> add_noise(std::span<const double> values, double delta,
                              std::uint64_t seed);

/// One CSV per point class: residual.csv, initial.csv, boundary.csv,
/// measurement.csv, with columns <coordinates..., target>.
void export_training_set(const TrainingSet& set,
                         const std::vector<std::string>& coordinate_names,
                         const std::filesystem::path& dir);
TrainingSet import_training_set(const std::filesystem::path& dir);

void write_point_set_csv(const PointSet& set,
                         const std::vector<std::string>& coordinate_names,
                         const std::filesystem::path& file);
PointSet read_point_set_csv(const std::filesystem::path& file);

}  // namespace cpikan
