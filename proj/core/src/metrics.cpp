#include "apinn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace apinn {

ErrorReport compute_errors(const FieldSampler& pred, const ProblemSpec& problem,
                           const EvalGrid& grid, const std::string& model_id) {
  if (grid.xs.empty() || grid.ts.empty()) throw std::invalid_argument("empty evaluation grid");

  ErrorReport report;
  report.nx = static_cast<int>(grid.xs.size());
  report.nt = static_cast<int>(grid.ts.size());
  report.model_id = model_id;
  report.problem_id = problem.id;
  report.e1.resize(static_cast<std::size_t>(report.nx) * report.nt);

  double sum_sq = 0.0;
  double gt_sq = 0.0;
  double max_abs = 0.0;
  std::size_t idx = 0;
  for (double t : grid.ts) {
    for (double x : grid.xs) {
      const double gt = problem.exact(x, t);
      const double diff = pred(x, t) - gt;
      const double e1 = std::abs(diff);
      report.e1[idx++] = e1;
      sum_sq += diff * diff;
      gt_sq += gt * gt;
      if (e1 > max_abs) max_abs = e1;
    }
  }
  if (gt_sq == 0.0) {
    throw std::domain_error("ground-truth norm is zero on this grid; relative error undefined");
  }
  report.e2 = sum_sq / static_cast<double>(report.e1.size());
  report.e3 = std::sqrt(sum_sq) / std::sqrt(gt_sq);
  report.e4 = max_abs;
  return report;
}

std::vector<SliceRow> slice_at_time(const FieldSampler& pred, const ProblemSpec& problem, double t,
                                    int nx) {
  if (t < 0.0 || t > problem.t_max) throw std::invalid_argument("slice time outside the domain");
  if (nx < 2) throw std::invalid_argument("slice needs nx >= 2");
  const auto xs = linspace(problem.x_min, problem.x_max, nx);
  std::vector<SliceRow> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    SliceRow r;
    r.x = x;
    r.gt = problem.exact(x, t);
    r.pred = pred(x, t);
    r.e1 = std::abs(r.pred - r.gt);
    rows.push_back(r);
  }
  return rows;
}

namespace {
std::string formatted(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}
}  // namespace

std::string format_coord(double x) { return formatted("%.2f", x); }
std::string format_value(double v) { return formatted("%.6f", v + 0.0); }
std::string format_error(double e) { return formatted("%.3e", e); }

}  // namespace apinn
