#pragma once

#include <functional>
#include <vector>

#include "cpikan/pde_problems.hpp"

namespace cpikan {

/// u_t = D u_xx - r (u^3 - u) + g(x, t) on [-M, M] x [0, T] with Dirichlet
/// data. Allen-Cahn is r = 5, g = 0.
struct ReactionDiffusion1d {
  double half_width = 1.0;
  double final_time = 1.0;
  double diffusion = 0.0;
  double reaction = 5.0;
  std::function<double(double)> initial;
  std::function<double(double)> left;   // u(-M, t)
  std::function<double(double)> right;  // u(M, t)
  std::function<double(double, double)> source;  // may be empty
};

struct FdGrid {
  int intervals = 0;    // spatial cells over [-M, M]
  int steps = 0;        // time steps over [0, T]
  int store_every = 1;  // keep every n-th time level
};

/// Space-time samples of a finite-difference solution.
class GridSolution {
 public:
  GridSolution(std::vector<double> x, std::vector<double> t,
               std::vector<double> values);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& t() const { return t_; }
  double at_node(std::size_t time_row, std::size_t node) const {
    return values_[time_row * x_.size() + node];
  }
  /// Bilinear interpolation; clamps to the grid box.
  double at(double x, double t) const;

 private:
  std::vector<double> x_, t_, values_;
};

/// Second-order central differences in space; Crank-Nicolson for diffusion
/// and second-order Adams-Bashforth for the reaction and source (forward
/// Euler on the first step).
GridSolution solve_reaction_diffusion_1d(const ReactionDiffusion1d& problem,
                                         const FdGrid& grid);

/// Max-norm difference between a solution and one computed with half the
/// cell size and half the time step, compared on the coarse nodes and the
/// coarse stored time levels.
double refinement_change(const ReactionDiffusion1d& problem,
                         const FdGrid& grid);

/// Default Allen-Cahn reference grid for half width M.
FdGrid default_allen_cahn_grid(const ProblemSpec& p);

inline constexpr double kReferenceRefinementTolerance = 1e-4;

/// Allen-Cahn reference solution. With `verify`, the grid-refinement check
/// runs first and a std::runtime_error is thrown if halving the cell size
/// and time step moves the solution by kReferenceRefinementTolerance or more.
GridSolution reference_solution(const ProblemSpec& p, const FdGrid& grid,
                                bool verify = true);

ReactionDiffusion1d allen_cahn_system(const ProblemSpec& p);

}  // namespace cpikan
