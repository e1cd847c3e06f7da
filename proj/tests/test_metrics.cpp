#include <cmath>
#include <numbers>

#include <doctest.h>

#include "apinn/metrics.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"

using namespace apinn;

TEST_CASE("a perfect prediction scores zero on every metric") {
  const ProblemSpec prob = p1();
  const auto report = compute_errors(prob.exact, prob, eval_grid(prob, 21, 21), "gt");
  CHECK(report.e2 == 0.0);
  CHECK(report.e3 == 0.0);
  CHECK(report.e4 == 0.0);
  for (double e : report.e1) CHECK(e == 0.0);
}

TEST_CASE("a constant shift moves the metrics by the expected amounts") {
  const ProblemSpec prob = p1();
  const FieldSampler shifted = [&prob](double x, double t) { return prob.exact(x, t) + 0.1; };
  const auto report = compute_errors(shifted, prob, eval_grid(prob, 21, 21), "shifted");
  CHECK(report.e4 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.e2 == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("metric consistency identities") {
  const ProblemSpec prob = p2();
  // a lumpy synthetic prediction
  const FieldSampler pred = [&prob](double x, double t) {
    return prob.exact(x, t) + 0.05 * std::sin(3 * x + t) + 0.01 * x;
  };
  const EvalGrid grid = eval_grid(prob, 31, 17);
  const auto report = compute_errors(pred, prob, grid, "synthetic");

  double mean_sq = 0.0, max_e = 0.0, diff_sq = 0.0, gt_sq = 0.0;
  for (double e : report.e1) {
    mean_sq += e * e;
    max_e = std::max(max_e, e);
  }
  mean_sq /= static_cast<double>(report.e1.size());
  for (double t : grid.ts) {
    for (double x : grid.xs) {
      const double d = pred(x, t) - prob.exact(x, t);
      diff_sq += d * d;
      gt_sq += prob.exact(x, t) * prob.exact(x, t);
    }
  }
  CHECK(report.e2 == doctest::Approx(mean_sq).epsilon(1e-12));
  CHECK(report.e4 == doctest::Approx(max_e).epsilon(1e-12));
  CHECK(report.e3 * std::sqrt(gt_sq) == doctest::Approx(std::sqrt(diff_sq)).epsilon(1e-12));
}

TEST_CASE("scaling prediction and ground truth together preserves e3") {
  const double s = 3.7;
  ProblemSpec scaled = p1();
  const auto base_exact = p1().exact;
  scaled.exact = [base_exact, s](double x, double t) { return s * base_exact(x, t); };

  const FieldSampler pred = [base_exact](double x, double t) {
    return base_exact(x, t) + 0.02 * x * t;
  };
  const FieldSampler pred_scaled = [pred, s](double x, double t) { return s * pred(x, t); };

  const EvalGrid grid = eval_grid(scaled, 15, 15);
  const auto base = compute_errors(pred, p1(), grid, "base");
  const auto big = compute_errors(pred_scaled, scaled, grid, "scaled");
  CHECK(big.e3 == doctest::Approx(base.e3).epsilon(1e-12));
  CHECK(big.e4 == doctest::Approx(s * base.e4).epsilon(1e-12));
  CHECK(big.e2 == doctest::Approx(s * s * base.e2).epsilon(1e-12));
}

TEST_CASE("a localized perturbation cannot decrease any metric") {
  const ProblemSpec prob = p1();
  const EvalGrid grid = eval_grid(prob, 11, 11);
  const auto clean = compute_errors(prob.exact, prob, grid, "clean");
  const double bx = grid.xs[4], bt = grid.ts[7];
  const FieldSampler bumped = [&prob, bx, bt](double x, double t) {
    const bool hit = (x == bx) && (t == bt);
    return prob.exact(x, t) + (hit ? 0.3 : 0.0);
  };
  const auto bumped_report = compute_errors(bumped, prob, grid, "bumped");
  CHECK(bumped_report.e2 >= clean.e2);
  CHECK(bumped_report.e3 >= clean.e3);
  CHECK(bumped_report.e4 >= clean.e4);
}

TEST_CASE("zero ground truth makes the relative error undefined") {
  ProblemSpec flat = p1();
  flat.exact = [](double, double) { return 0.0; };
  CHECK_THROWS(compute_errors([](double, double) { return 1.0; }, flat, eval_grid(flat, 5, 5)));
}

TEST_CASE("slice ground truth matches the published columns") {
  SUBCASE("p1 at t = 0.5") {
    const auto rows = slice_at_time(p1().exact, p1(), 0.5, 11);
    REQUIRE(rows.size() == 11);
    CHECK(std::abs(rows[3].gt - 0.178456) < 5e-7);  // x = 0.30
    CHECK(std::abs(rows[5].gt - 0.220584) < 5e-7);
  }
  SUBCASE("p3 at t = 0.9") {
    const auto rows = slice_at_time(p3().exact, p3(), 0.9, 11);
    CHECK(std::abs(rows[2].gt - (-0.904508)) < 5e-7);  // x = 1.88
  }
  SUBCASE("perfect prediction zeroes the error column") {
    for (const auto& row : slice_at_time(p2().exact, p2(), 0.4, 11)) {
      CHECK(row.e1 == 0.0);
    }
  }
  SUBCASE("out-of-domain times are rejected") {
    CHECK_THROWS(slice_at_time(p1().exact, p1(), 1.5, 11));
  }
}

TEST_CASE("table formatting is fixed-width and locale independent") {
  CHECK(format_coord(0.30000000001) == "0.30");
  CHECK(format_coord(3.1415926) == "3.14");
  CHECK(format_value(0.1784559) == "0.178456");
  CHECK(format_value(-0.0) == "0.000000");
  CHECK(format_error(0.00123456) == "1.235e-03");
}
