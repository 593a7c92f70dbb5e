#include "cpikan/allen_cahn_reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cpikan {

GridSolution::GridSolution(std::vector<double> x, std::vector<double> t,
                           std::vector<double> values)
    : x_(std::move(x)), t_(std::move(t)), values_(std::move(values)) {
  if (x_.size() < 2 || t_.empty() || values_.size() != x_.size() * t_.size()) {
    throw std::invalid_argument("GridSolution: inconsistent shape");
  }
}

double GridSolution::at(double x, double t) const {
  auto bracket = [](const std::vector<double>& axis, double v,
                    std::size_t& lo, double& w) {
    if (axis.size() == 1 || v <= axis.front()) {
      lo = 0;
      w = 0.0;
      return;
    }
    if (v >= axis.back()) {
      lo = axis.size() - 2;
      w = 1.0;
      return;
    }
    const auto it = std::upper_bound(axis.begin(), axis.end(), v);
    lo = static_cast<std::size_t>(it - axis.begin()) - 1;
    w = (v - axis[lo]) / (axis[lo + 1] - axis[lo]);
  };
  std::size_t ix, it;
  double wx, wt;
  bracket(x_, x, ix, wx);
  bracket(t_, t, it, wt);
  const std::size_t it1 = t_.size() == 1 ? it : it + 1;
  const double v0 = (1 - wx) * at_node(it, ix) + wx * at_node(it, ix + 1);
  const double v1 = (1 - wx) * at_node(it1, ix) + wx * at_node(it1, ix + 1);
  return (1 - wt) * v0 + wt * v1;
}

GridSolution solve_reaction_diffusion_1d(const ReactionDiffusion1d& pr,
                                         const FdGrid& grid) {
  if (grid.intervals < 2 || grid.steps < 1 || grid.store_every < 1) {
    throw std::invalid_argument("fd solver: grid too small");
  }
  if (!pr.initial || !pr.left || !pr.right) {
    throw std::invalid_argument("fd solver: initial and boundary data required");
  }
  const int N = grid.intervals;
  const double M = pr.half_width;
  const double dx = 2.0 * M / N;
  const double dt = pr.final_time / grid.steps;
  const double r = pr.diffusion * dt / (dx * dx);

  std::vector<double> x(N + 1);
  for (int i = 0; i <= N; ++i) x[i] = -M + i * dx;
  x[N] = M;

  std::vector<double> u(N + 1), u_next(N + 1);
  for (int i = 0; i <= N; ++i) u[i] = pr.initial(x[i]);

  auto reaction = [&](const std::vector<double>& v, double t,
                      std::vector<double>& out) {
    for (int i = 1; i < N; ++i) {
      out[i] = -pr.reaction * (v[i] * v[i] * v[i] - v[i]);
      if (pr.source) out[i] += pr.source(x[i], t);
    }
  };

  std::vector<double> times;
  std::vector<double> stored;
  times.push_back(0.0);
  stored.insert(stored.end(), u.begin(), u.end());

  // Thomas algorithm on the constant CN matrix tridiag(-r/2, 1 + r, -r/2).
  const int n_in = N - 1;
  std::vector<double> cprime(n_in), rhs(n_in);
  const double diag = 1.0 + r;
  const double off = -0.5 * r;
  cprime[0] = off / diag;
  std::vector<double> denom(n_in);
  denom[0] = diag;
  for (int i = 1; i < n_in; ++i) {
    denom[i] = diag - off * cprime[i - 1];
    cprime[i] = off / denom[i];
  }

  std::vector<double> R(N + 1, 0.0), R_prev(N + 1, 0.0);
  for (int n = 0; n < grid.steps; ++n) {
    const double t = n * dt;
    const double t_next = (n + 1) * dt;
    reaction(u, t, R);
    const double left_next = pr.left(t_next);
    const double right_next = pr.right(t_next);
    for (int i = 1; i < N; ++i) {
      const double explicit_part =
          n == 0 ? R[i] : 1.5 * R[i] - 0.5 * R_prev[i];
      rhs[i - 1] = u[i] + 0.5 * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) +
                   dt * explicit_part;
    }
    rhs[0] += 0.5 * r * left_next;
    rhs[n_in - 1] += 0.5 * r * right_next;

    // forward sweep
    rhs[0] /= denom[0];
    for (int i = 1; i < n_in; ++i) {
      rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom[i];
    }
    for (int i = n_in - 2; i >= 0; --i) rhs[i] -= cprime[i] * rhs[i + 1];

    u_next[0] = left_next;
    u_next[N] = right_next;
    for (int i = 1; i < N; ++i) u_next[i] = rhs[i - 1];
    std::swap(u, u_next);
    std::swap(R, R_prev);

    if ((n + 1) % grid.store_every == 0 || n + 1 == grid.steps) {
      times.push_back(t_next);
      stored.insert(stored.end(), u.begin(), u.end());
    }
  }
  for (double v : u) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("fd solver: solution became non-finite");
    }
  }
  return GridSolution(std::move(x), std::move(times), std::move(stored));
}

double refinement_change(const ReactionDiffusion1d& problem,
                         const FdGrid& grid) {
  const GridSolution coarse = solve_reaction_diffusion_1d(problem, grid);
  const FdGrid fine_grid{2 * grid.intervals, 2 * grid.steps,
                         2 * grid.store_every};
  const GridSolution fine = solve_reaction_diffusion_1d(problem, fine_grid);
  const std::size_t rows = std::min(coarse.t().size(), fine.t().size());
  double worst = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    if (std::abs(coarse.t()[k] - fine.t()[k]) > 1e-12) {
      throw std::logic_error("refinement: stored time levels do not align");
    }
    for (std::size_t i = 0; i < coarse.x().size(); ++i) {
      worst = std::max(worst,
                       std::abs(coarse.at_node(k, i) - fine.at_node(k, 2 * i)));
    }
  }
  return worst;
}

ReactionDiffusion1d allen_cahn_system(const ProblemSpec& p) {
  if (p.kind != ProblemKind::AllenCahn) {
    throw std::invalid_argument("reference solution is only defined for allen_cahn");
  }
  ReactionDiffusion1d sys;
  sys.half_width = p.half_widths[0];
  sys.final_time = p.final_time;
  sys.diffusion = p.params.diffusion;
  sys.reaction = 5.0;
  sys.initial = [p](double x) {
    const double xs[1] = {x};
    return initial_value(p, xs);
  };
  sys.left = [](double) { return -1.0; };
  sys.right = [](double) { return -1.0; };
  return sys;
}

FdGrid default_allen_cahn_grid(const ProblemSpec& p) {
  const int intervals =
      static_cast<int>(std::lround(1024.0 * p.half_widths.at(0)));
  const int steps = static_cast<int>(std::lround(p.final_time / 1e-4));
  return FdGrid{intervals, steps, std::max(1, steps / 1000)};
}

GridSolution reference_solution(const ProblemSpec& p, const FdGrid& grid,
                                bool verify) {
  const ReactionDiffusion1d sys = allen_cahn_system(p);
  if (verify) {
    const double change = refinement_change(sys, grid);
    if (!(change < kReferenceRefinementTolerance)) {
      throw std::runtime_error(
          "allen_cahn reference: refinement changed the solution by " +
          std::to_string(change) + " (tolerance " +
          std::to_string(kReferenceRefinementTolerance) + ")");
    }
  }
  return solve_reaction_diffusion_1d(sys, grid);
}

}  // namespace cpikan
