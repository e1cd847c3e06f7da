#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "apinn/problems.hpp"

namespace apinn {

enum class SampleStrategy { UniformRandom, Grid };

std::string to_string(SampleStrategy s);
SampleStrategy strategy_from_string(const std::string& s);

// Per-region training point budget. n_b counts points per boundary end.
struct CollocationCounts {
  int n_f = 500;  // interior residual points
  int n_b = 200;  // boundary points per end
  int n_0 = 200;  // initial-line points
  int n_a = 500;  // auxiliary constraint points
};

struct BoundaryPoint {
  int end = 0;  // 0 = x_min, 1 = x_max
  double t = 0.0;
};

struct CollocationSet {
  std::vector<std::array<double, 2>> interior;   // (x, t)
  std::vector<std::array<double, 2>> auxiliary;  // (x, t)
  std::vector<BoundaryPoint> boundary;           // 2 * n_b entries, left end first
  std::vector<double> initial;                   // x on the t = 0 line
  CollocationCounts counts;
  std::uint64_t seed = 0;
  SampleStrategy strategy = SampleStrategy::UniformRandom;
};

// Draws the four training point sets. Uniform-random uses independent
// counter-based streams per region, so the draw is reproducible and
// insensitive to region ordering; grid places equispaced points (interior and
// auxiliary points on a near-square tensor grid truncated to the requested
// count, boundary/initial points equispaced in their 1-D coordinate).
CollocationSet sample_collocation(const ProblemSpec& problem, const CollocationCounts& counts,
                                  std::uint64_t seed, SampleStrategy strategy);

struct EvalGrid {
  std::vector<double> xs;
  std::vector<double> ts;
};

// Tensor-product equispaced evaluation mesh including both endpoints.
EvalGrid eval_grid(const ProblemSpec& problem, int nx, int nt);

// nx equispaced values covering [lo, hi] including both endpoints.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace apinn
