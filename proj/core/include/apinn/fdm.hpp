#pragma once

#include <string>
#include <vector>

#include "apinn/problems.hpp"

namespace apinn {

// Uniform space-time mesh including both spatial endpoints; time level j is
// t = j * dt, and (nt - 1) * dt covers [0, t_max] exactly.
struct Grid {
  double dx = 0.0;
  double dt = 0.0;
  int nx = 0;
  int nt = 0;
  double x_min = 0.0;

  double x(int i) const { return x_min + dx * i; }
  double t(int j) const { return dt * j; }
};

// Builds a grid with nx spatial points and dt chosen as dt_factor * dx^2,
// rounded down so the final level lands exactly on t_max.
Grid make_grid(const ProblemSpec& problem, int nx, double dt_factor = 0.25);

// Largest stable time step for the explicit central-time scheme applied to
// u_tt = -c^2 u_xxxx: the spatial symbol peaks at 16 c^2 / dx^4, giving
// dt_max = dx^2 / (2 sqrt(c^2)).
double stability_limit(double dx, double c_sq);

struct GridSolution {
  Grid grid;
  std::string problem_id;
  std::vector<double> values;  // nt x nx, row-major in time

  double at(int j, int i) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
};

struct FdmOptions {
  // Reject dt above the stability limit. Disabling this runs the scheme
  // anyway so the predicted blow-up can be observed.
  bool enforce_stability = true;
  // Abort threshold: max |u| > blowup_factor * max |phi|.
  double blowup_factor = 10.0;
};

// Explicit leapfrog for c^2 u_xxxx + u_tt + kappa u = f with the 5-point
// fourth-difference stencil, simply supported ends (pinned zero boundary
// columns, antisymmetric ghost points u_{-1} = -u_1), and a second-order
// Taylor first step. Throws on instability.
GridSolution solve_fdm(const ProblemSpec& problem, const Grid& grid, const FdmOptions& options = {});

// Bilinear interpolation of the stored field; (x, t) must be inside the grid.
double sample_solution(const GridSolution& solution, double x, double t);

}  // namespace apinn
