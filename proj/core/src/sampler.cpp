#include "apinn/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "apinn/rng.hpp"

namespace apinn {

namespace {

enum Stream : std::uint64_t {
  kInterior = 1,
  kBoundaryLeft = 2,
  kBoundaryRight = 3,
  kInitial = 4,
  kAuxiliary = 5,
};

std::vector<std::array<double, 2>> draw_region(const ProblemSpec& p, int n, std::uint64_t seed,
                                               std::uint64_t stream) {
  std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint64_t>(i);
    pts[static_cast<std::size_t>(i)] = {
        rng_uniform(seed, stream, 2 * c, p.x_min, p.x_max),
        rng_uniform(seed, stream, 2 * c + 1, 0.0, p.t_max),
    };
  }
  return pts;
}

std::vector<std::array<double, 2>> grid_region(const ProblemSpec& p, int n) {
  const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int nt = (n + nx - 1) / nx;
  const auto xs = linspace(p.x_min, p.x_max, nx);
  const auto ts = linspace(0.0, p.t_max, nt);
  std::vector<std::array<double, 2>> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < nt && static_cast<int>(pts.size()) < n; ++j) {
    for (int i = 0; i < nx && static_cast<int>(pts.size()) < n; ++i) {
      pts.push_back({xs[static_cast<std::size_t>(i)], ts[static_cast<std::size_t>(j)]});
    }
  }
  return pts;
}

}  // namespace

std::string to_string(SampleStrategy s) {
  return s == SampleStrategy::UniformRandom ? "uniform-random" : "grid";
}

SampleStrategy strategy_from_string(const std::string& s) {
  if (s == "uniform-random") return SampleStrategy::UniformRandom;
  if (s == "grid") return SampleStrategy::Grid;
  throw std::invalid_argument("unknown sampling strategy: " + s);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace needs n >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
  v.back() = hi;  // endpoint exact regardless of rounding
  return v;
}

CollocationSet sample_collocation(const ProblemSpec& problem, const CollocationCounts& counts,
                                  std::uint64_t seed, SampleStrategy strategy) {
  if (counts.n_f <= 0 || counts.n_b <= 0 || counts.n_0 <= 0 || counts.n_a <= 0) {
    throw std::invalid_argument("collocation counts must be positive");
  }
  if (!(problem.x_span() > 0.0) || !(problem.t_max > 0.0)) {
    throw std::invalid_argument("cannot sample a zero-measure domain");
  }

  CollocationSet set;
  set.counts = counts;
  set.seed = seed;
  set.strategy = strategy;

  if (strategy == SampleStrategy::UniformRandom) {
    set.interior = draw_region(problem, counts.n_f, seed, kInterior);
    set.auxiliary = draw_region(problem, counts.n_a, seed, kAuxiliary);
    set.initial.resize(static_cast<std::size_t>(counts.n_0));
    for (int i = 0; i < counts.n_0; ++i) {
      set.initial[static_cast<std::size_t>(i)] =
          rng_uniform(seed, kInitial, static_cast<std::uint64_t>(i), problem.x_min, problem.x_max);
    }
    set.boundary.reserve(static_cast<std::size_t>(2 * counts.n_b));
    for (int i = 0; i < counts.n_b; ++i) {
      set.boundary.push_back(
          {0, rng_uniform(seed, kBoundaryLeft, static_cast<std::uint64_t>(i), 0.0, problem.t_max)});
    }
    for (int i = 0; i < counts.n_b; ++i) {
      set.boundary.push_back(
          {1, rng_uniform(seed, kBoundaryRight, static_cast<std::uint64_t>(i), 0.0, problem.t_max)});
    }
  } else {
    set.interior = grid_region(problem, counts.n_f);
    set.auxiliary = grid_region(problem, counts.n_a);
    set.initial = linspace(problem.x_min, problem.x_max, counts.n_0);
    const auto bts = linspace(0.0, problem.t_max, counts.n_b);
    set.boundary.reserve(static_cast<std::size_t>(2 * counts.n_b));
    for (double t : bts) set.boundary.push_back({0, t});
    for (double t : bts) set.boundary.push_back({1, t});
  }
  return set;
}

EvalGrid eval_grid(const ProblemSpec& problem, int nx, int nt) {
  if (nx < 2 || nt < 2) throw std::invalid_argument("eval_grid needs nx, nt >= 2");
  return {linspace(problem.x_min, problem.x_max, nx), linspace(0.0, problem.t_max, nt)};
}

}  // namespace apinn
