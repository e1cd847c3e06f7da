#include "apinn/fdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apinn {

Grid make_grid(const ProblemSpec& problem, int nx, double dt_factor) {
  if (nx < 5) throw std::invalid_argument("make_grid needs nx >= 5");
  if (!(dt_factor > 0.0)) throw std::invalid_argument("dt_factor must be positive");
  Grid g;
  g.nx = nx;
  g.x_min = problem.x_min;
  g.dx = problem.x_span() / static_cast<double>(nx - 1);
  const double dt_target = dt_factor * g.dx * g.dx;
  const int steps = std::max(1, static_cast<int>(std::ceil(problem.t_max / dt_target - 1e-12)));
  g.nt = steps + 1;
  g.dt = problem.t_max / static_cast<double>(steps);
  return g;
}

double stability_limit(double dx, double c_sq) {
  if (!(dx > 0.0) || !(c_sq > 0.0)) throw std::invalid_argument("dx and c_sq must be positive");
  return dx * dx / (2.0 * std::sqrt(c_sq));
}

namespace {

// Fourth difference with antisymmetric ghosts; valid for 1 <= i <= nx-2.
double fourth_difference(const std::vector<double>& u, int i, int nx) {
  const double um2 = (i >= 2) ? u[static_cast<std::size_t>(i - 2)] : -u[1];
  const double up2 = (i <= nx - 3) ? u[static_cast<std::size_t>(i + 2)]
                                   : -u[static_cast<std::size_t>(nx - 2)];
  return um2 - 4.0 * u[static_cast<std::size_t>(i - 1)] + 6.0 * u[static_cast<std::size_t>(i)] -
         4.0 * u[static_cast<std::size_t>(i + 1)] + up2;
}

}  // namespace

GridSolution solve_fdm(const ProblemSpec& problem, const Grid& grid, const FdmOptions& options) {
  if (grid.nx < 5) throw std::invalid_argument("solve_fdm needs nx >= 5");
  if (grid.nt < 2) throw std::invalid_argument("solve_fdm needs nt >= 2");
  const double dt_max = stability_limit(grid.dx, problem.c_sq);
  if (options.enforce_stability && grid.dt > dt_max * (1.0 + 1e-12)) {
    throw std::invalid_argument("time step exceeds the explicit stability limit");
  }

  const int nx = grid.nx;
  const int nt = grid.nt;
  const double dt = grid.dt;
  const double inv_dx4 = 1.0 / (grid.dx * grid.dx * grid.dx * grid.dx);

  GridSolution sol;
  sol.grid = grid;
  sol.problem_id = problem.id;
  sol.values.assign(static_cast<std::size_t>(nt) * nx, 0.0);

  std::vector<double> prev(static_cast<std::size_t>(nx), 0.0);
  std::vector<double> cur(static_cast<std::size_t>(nx), 0.0);
  std::vector<double> next(static_cast<std::size_t>(nx), 0.0);

  double max_phi = 0.0;
  for (int i = 0; i < nx; ++i) {
    prev[static_cast<std::size_t>(i)] = problem.ic_phi(grid.x(i));
    max_phi = std::max(max_phi, std::abs(prev[static_cast<std::size_t>(i)]));
  }
  prev[0] = 0.0;
  prev[static_cast<std::size_t>(nx - 1)] = 0.0;
  std::copy(prev.begin(), prev.end(), sol.values.begin());

  const double blow_limit = options.blowup_factor * max_phi;
  auto check_bounded = [&](const std::vector<double>& u, int level) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    if (m > blow_limit) {
      throw std::runtime_error("finite-difference solution became unstable at t = " +
                               std::to_string(grid.t(level)));
    }
  };

  // Taylor first step: u^1 = u^0 + dt phi_t + dt^2/2 (f - c^2 D4 u^0 - kappa u^0)
  for (int i = 1; i < nx - 1; ++i) {
    const double accel = problem.forcing(grid.x(i), 0.0) -
                         problem.c_sq * fourth_difference(prev, i, nx) * inv_dx4 -
                         problem.kappa * prev[static_cast<std::size_t>(i)];
    cur[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i)] +
                                       dt * problem.ic_phi_t(grid.x(i)) + 0.5 * dt * dt * accel;
  }
  if (nt > 1) {
    check_bounded(cur, 1);
    std::copy(cur.begin(), cur.end(), sol.values.begin() + nx);
  }

  for (int j = 2; j < nt; ++j) {
    const double tj = grid.t(j - 1);
    for (int i = 1; i < nx - 1; ++i) {
      const double accel = problem.forcing(grid.x(i), tj) -
                           problem.c_sq * fourth_difference(cur, i, nx) * inv_dx4 -
                           problem.kappa * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(i)] = 2.0 * cur[static_cast<std::size_t>(i)] -
                                          prev[static_cast<std::size_t>(i)] + dt * dt * accel;
    }
    next[0] = 0.0;
    next[static_cast<std::size_t>(nx - 1)] = 0.0;
    check_bounded(next, j);
    std::copy(next.begin(), next.end(), sol.values.begin() + static_cast<std::size_t>(j) * nx);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return sol;
}

double sample_solution(const GridSolution& solution, double x, double t) {
  const Grid& g = solution.grid;
  const double fx = (x - g.x_min) / g.dx;
  const double ft = t / g.dt;
  const double tol = 1e-9;
  if (fx < -tol || fx > g.nx - 1 + tol || ft < -tol || ft > g.nt - 1 + tol) {
    throw std::out_of_range("sample point outside the solved grid");
  }
  const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor(ft)), 0, g.nt - 2);
  const double ax = std::clamp(fx - i0, 0.0, 1.0);
  const double at = std::clamp(ft - j0, 0.0, 1.0);
  const double v00 = solution.at(j0, i0);
  const double v01 = solution.at(j0, i0 + 1);
  const double v10 = solution.at(j0 + 1, i0);
  const double v11 = solution.at(j0 + 1, i0 + 1);
  return (1.0 - at) * ((1.0 - ax) * v00 + ax * v01) + at * ((1.0 - ax) * v10 + ax * v11);
}

}  // namespace apinn
