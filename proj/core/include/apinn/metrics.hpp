#pragma once

#include <functional>
#include <string>
#include <vector>

#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"

namespace apinn {

using FieldSampler = std::function<double(double x, double t)>;

// Per-model error summary on an evaluation grid:
//   e1: pointwise |pred - GT| field (nt rows x nx columns, row-major)
//   e2: mean of e1^2            e3: ||pred - GT||_2 / ||GT||_2
//   e4: max of e1
struct ErrorReport {
  std::vector<double> e1;
  int nx = 0;
  int nt = 0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
  std::string model_id;
  std::string problem_id;

  double e1_at(int j, int i) const { return e1[static_cast<std::size_t>(j) * nx + i]; }
};

// Evaluates `pred` and the exact solution on every grid node. Throws when the
// ground-truth norm vanishes (relative error undefined).
ErrorReport compute_errors(const FieldSampler& pred, const ProblemSpec& problem,
                           const EvalGrid& grid, const std::string& model_id = "");

struct SliceRow {
  double x = 0.0;
  double gt = 0.0;
  double pred = 0.0;
  double e1 = 0.0;
};

// Solution profile at one time instant on nx equispaced x values including
// the endpoints.
std::vector<SliceRow> slice_at_time(const FieldSampler& pred, const ProblemSpec& problem, double t,
                                    int nx);

// Fixed table formatting: coordinates to 2 decimals, field values to 6
// decimals, pointwise errors in 3-significant-digit scientific notation.
std::string format_coord(double x);
std::string format_value(double v);
std::string format_error(double e);

}  // namespace apinn
