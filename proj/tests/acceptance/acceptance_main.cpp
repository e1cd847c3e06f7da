// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Deterministic oracles run first; the stochastic training
// criteria (3-seed medians at the published schedules) dominate the runtime
// and cache their artifacts under acceptance_out/ so reruns are cheap.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "apinn/rng.hpp"

#include "apinn/experiment.hpp"
#include "apinn/fdm.hpp"
#include "apinn/loss.hpp"
#include "apinn/metrics.hpp"
#include "apinn/network.hpp"
#include "apinn/optim.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"
#include "apinn/sann.hpp"

using namespace apinn;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) g_failures += 1;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// Criterion 1: ground-truth slice fidelity (deterministic)
// ---------------------------------------------------------------------------

struct ReferenceSlice {
  const char* problem;
  double t;
  std::array<double, 11> gt;
};

// Published slice-table ground-truth columns, 6 decimals, 11 equispaced x.
constexpr ReferenceSlice kSlices[] = {
    {"p1", 0.5, {0.000000, 0.068164, 0.129656, 0.178456, 0.209788, 0.220584, 0.209788, 0.178456,
                 0.129656, 0.068164, 0.000000}},
    {"p1", 0.9, {0.000000, -0.264707, -0.503502, -0.693012, -0.814684, -0.856610, -0.814684,
                 -0.693012, -0.503502, -0.264707, 0.000000}},
    {"p2", 0.4, {0.000000, 0.095492, 0.181636, 0.250000, 0.293893, 0.309017, 0.293893, 0.250000,
                 0.181636, 0.095492, 0.000000}},
    {"p2", 0.8, {0.000000, -0.250000, -0.475528, -0.654508, -0.769421, -0.809017, -0.769421,
                 -0.654508, -0.475528, -0.250000, 0.000000}},
    {"p3", 0.3, {0.000000, 0.475528, 0.559017, 0.181636, -0.345492, -0.587785, -0.345492, 0.181636,
                 0.559017, 0.475528, 0.000000}},
    {"p3", 0.9, {0.000000, -0.769421, -0.904508, -0.293893, 0.559017, 0.951057, 0.559017,
                 -0.293893, -0.904508, -0.769421, 0.000000}},
};

void criterion_1_ground_truth() {
  double worst = 0.0;
  for (const auto& ref : kSlices) {
    const ProblemSpec prob = problem_by_id(ref.problem);
    const auto rows = slice_at_time(prob.exact, prob, ref.t, 11);
    for (int i = 0; i < 11; ++i) {
      worst = std::max(worst, std::abs(rows[static_cast<std::size_t>(i)].gt -
                                       ref.gt[static_cast<std::size_t>(i)]));
    }
  }
  report("1 ground-truth slice tables (6 slices x 11 points, 6 decimals)", worst <= 5.0e-7,
         "max deviation " + fmt("%.2e", worst) + " (tol 5.0e-7)");
}

// ---------------------------------------------------------------------------
// Criterion 2: exact-solution residual oracle (deterministic)
// ---------------------------------------------------------------------------

void criterion_2_residual_oracle() {
  double worst = 0.0;
  for (const auto& prob : {p1(), p2(), p3()}) {
    const EvalGrid grid = eval_grid(prob, 50, 50);
    for (double t : grid.ts) {
      for (double x : grid.xs) {
        worst = std::max(worst, std::abs(residual_of_exact(prob, x, t)));
      }
    }
  }
  report("2 exact-solution residual on 50x50 grids", worst < 1e-9,
         "max |residual| " + fmt("%.2e", worst) + " (tol 1e-9)");
}

// ---------------------------------------------------------------------------
// Criterion 3: autodiff correctness (deterministic)
// ---------------------------------------------------------------------------

// Long-double straight-line network evaluation: the independent oracle for
// finite-difference derivatives of the jet pass.
long double forward_ld(const Params& p, long double x, long double t) {
  const auto views = layer_views(p.config);
  std::vector<long double> cur = {x, t};
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    std::vector<long double> nxt(static_cast<std::size_t>(v.rows));
    for (int i = 0; i < v.rows; ++i) {
      long double z = p.values[static_cast<std::size_t>(v.bias_offset + i)];
      for (int j = 0; j < v.cols; ++j) {
        z += static_cast<long double>(
                 p.values[static_cast<std::size_t>(v.weight_offset + i * v.cols + j)]) *
             cur[static_cast<std::size_t>(j)];
      }
      nxt[static_cast<std::size_t>(i)] = z;
    }
    if (l + 1 < views.size()) {
      for (auto& z : nxt) z = std::tanh(z);
    }
    cur = nxt;
  }
  return cur[0];
}

// Central difference of order k with Richardson extrapolation.
double fd_derivative(const Params& p, double x, double t, int k, double h) {
  const auto f = [&p, t](long double xx) { return forward_ld(p, xx, t); };
  const auto stencil = [&f, x, k](long double hh) -> long double {
    switch (k) {
      case 1: return (f(x + hh) - f(x - hh)) / (2 * hh);
      case 2: return (f(x + hh) - 2 * f(x) + f(x - hh)) / (hh * hh);
      case 3:
        return (f(x + 2 * hh) - 2 * f(x + hh) + 2 * f(x - hh) - f(x - 2 * hh)) /
               (2 * hh * hh * hh);
      default:
        return (f(x + 2 * hh) - 4 * f(x + hh) + 6 * f(x) - 4 * f(x - hh) + f(x - 2 * hh)) /
               (hh * hh * hh * hh);
    }
  };
  const long double d_h = stencil(h);
  const long double d_h2 = stencil(h / 2);
  return static_cast<double>((4.0L * d_h2 - d_h) / 3.0L);
}

void criterion_3_autodiff() {
  // (a) parameter gradients of both losses vs central finite differences
  double worst_grad = 0.0;
  for (const auto& prob : {p1(), p2(), p3()}) {
    const auto colloc =
        sample_collocation(prob, {15, 5, 6, 10}, 6, SampleStrategy::UniformRandom);
    for (ModelKind kind : {ModelKind::Pinn, ModelKind::Apinn}) {
      MlpConfig config{2, 5, kind == ModelKind::Apinn ? 2 : 1};
      const Params params = init_params(config, 23);
      BeamLossObjective obj(prob, colloc, kind, config);
      const LossWeights w;
      std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
      obj.eval(params.values, w, grad);
      double max_abs = 0.0;
      for (double g : grad) max_abs = std::max(max_abs, std::abs(g));
      const double h = 1e-6;
      for (std::size_t i = 0; i < params.values.size(); ++i) {
        std::vector<double> theta = params.values;
        theta[i] += h;
        const double fp = obj.value(theta, w).total;
        theta[i] -= 2 * h;
        const double fm = obj.value(theta, w).total;
        const double fd = (fp - fm) / (2 * h);
        const double denom = std::max(std::abs(fd), 1e-2 * max_abs);
        worst_grad = std::max(worst_grad, std::abs(grad[i] - fd) / denom);
      }
    }
  }

  // (b) jet input-derivatives up to order 4 vs finite differences
  double worst_jet = 0.0;
  const Params net = init_params(MlpConfig{2, 5, 1}, 23);
  for (double x : {0.2, 0.5, 0.8}) {
    const auto jet = forward_jet(net, x, 0.4, Axis::X, 4)[0];
    for (int k = 1; k <= 4; ++k) {
      const double h = (k <= 2) ? 1e-3 : 8e-3;
      const double fd = fd_derivative(net, x, 0.4, k, h);
      const double rel = std::abs(jet.derivative(k) - fd) / std::max(std::abs(fd), 1e-8);
      worst_jet = std::max(worst_jet, rel);
    }
  }

  const bool pass = worst_grad < 1e-4 && worst_jet < 1e-5;
  report("3 autodiff gradients and jet derivatives", pass,
         "grad rel err " + fmt("%.2e", worst_grad) + " (tol 1e-4), jet rel err " +
             fmt("%.2e", worst_jet) + " (tol 1e-5)");
}

// ---------------------------------------------------------------------------
// Criterion 4: finite-difference baseline behavior (deterministic)
// ---------------------------------------------------------------------------

void criterion_4_fdm() {
  const ProblemSpec prob = p1();

  std::vector<double> dxs = {1.0 / 10, 1.0 / 20, 1.0 / 40};
  std::vector<double> errors;
  for (double dx : dxs) {
    const int nx = static_cast<int>(std::llround(1.0 / dx)) + 1;
    const Grid grid = make_grid(prob, nx, 0.25);
    const GridSolution sol = solve_fdm(prob, grid);
    const int level = static_cast<int>(std::llround(0.25 / grid.dt));
    double worst = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
      worst = std::max(worst, std::abs(sol.at(level, i) - prob.exact(grid.x(i), 0.25)));
    }
    errors.push_back(worst);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dxs.size(); ++i) {
    sx += std::log(dxs[i]);
    sy += std::log(errors[i]);
    sxx += std::log(dxs[i]) * std::log(dxs[i]);
    sxy += std::log(dxs[i]) * std::log(errors[i]);
  }
  const double n = 3.0;
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool order_ok = order >= 1.7 && order <= 2.3;

  double stencil_worst = 0.0;
  const double dx = 0.1;
  for (int i = 2; i <= 8; ++i) {
    auto u = [dx](int idx) { return std::pow(dx * idx, 4); };
    const double d4 = (u(i - 2) - 4 * u(i - 1) + 6 * u(i) - 4 * u(i + 1) + u(i + 2)) /
                      std::pow(dx, 4);
    stencil_worst = std::max(stencil_worst, std::abs(d4 - 24.0));
  }

  // 0.0052 sits just past the discrete stability edge of the nx=11 grid
  // (0.005126, mode 9); the continuum formula gives 0.005.
  Grid unstable{0.1, 0.0052, 11, 0, 0.0};
  unstable.nt = static_cast<int>(std::ceil(1.0 / unstable.dt)) + 1;
  bool blew_up = false;
  try {
    solve_fdm(prob, unstable, {false, 10.0});
  } catch (const std::runtime_error&) {
    blew_up = true;
  }
  Grid stable = unstable;
  stable.dt = 0.0049;
  stable.nt = static_cast<int>(std::ceil(1.0 / stable.dt)) + 1;
  bool stayed = true;
  try {
    const GridSolution sol = solve_fdm(prob, stable, {false, 10.0});
    for (double v : sol.values) stayed = stayed && std::abs(v) < 1.1;
  } catch (...) {
    stayed = false;
  }

  const bool pass = order_ok && stencil_worst <= 1e-8 && blew_up && stayed;
  report("4 fdm convergence, stencil exactness, stability edge", pass,
         "order " + fmt("%.2f", order) + " (2.0+/-0.3), quartic dev " +
             fmt("%.1e", stencil_worst) + " (tol 1e-8), dt=0.0052 " +
             (blew_up ? "blew up" : "stayed bounded") + ", dt=0.0049 " +
             (stayed ? "bounded" : "unstable"));
}

// ---------------------------------------------------------------------------
// Criteria 5-7: trained model quality (stochastic, 3-seed medians)
// ---------------------------------------------------------------------------

struct TrainedCell {
  std::vector<double> e2, e3, final_loss;
};

std::map<std::string, TrainedCell> g_cells;

void run_cell(const std::string& problem, const std::string& model, const std::string& out_dir,
              const std::vector<std::uint64_t>& seeds) {
  for (std::uint64_t seed : seeds) {
    ExperimentConfig config = default_config(problem, model);
    config.out_dir = out_dir;
    config.seed = seed;
    config.sampling_seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const TrainOutcome outcome = cmd_train(config);
    const ErrorReport err = cmd_evaluate(config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  .. %s/%s seed %llu: loss %.3e  E3 %.3e  (%.0fs)\n", problem.c_str(),
                model.c_str(), static_cast<unsigned long long>(seed),
                outcome.report.final_loss.total, err.e3, secs);
    std::fflush(stdout);
    auto& cell = g_cells[problem + "/" + model];
    cell.e2.push_back(err.e2);
    cell.e3.push_back(err.e3);
    cell.final_loss.push_back(outcome.report.final_loss.total);
  }
}

void criterion_5_training_quality(const std::string& out_dir,
                                  const std::vector<std::uint64_t>& seeds) {
  bool pass = true;
  std::string detail;
  for (const std::string problem : {"p1", "p2", "p3"}) {
    run_cell(problem, "apinn", out_dir, seeds);
    const auto& cell = g_cells[problem + "/apinn"];
    const double e3 = median(cell.e3);
    const double loss = median(cell.final_loss);
    pass = pass && e3 <= 1e-2 && loss <= 1e-4;
    detail += problem + ": E3 " + fmt("%.3e", e3) + ", loss " + fmt("%.3e", loss) + "; ";
  }
  report("5 A-PINN training quality (median E3 <= 1e-2, median loss <= 1e-4)", pass, detail);
}

void criterion_6_apinn_vs_pinn(const std::string& out_dir,
                               const std::vector<std::uint64_t>& seeds) {
  bool pass = true;
  std::string detail;
  for (const std::string problem : {"p1", "p3"}) {
    run_cell(problem, "pinn", out_dir, seeds);
    const double a = median(g_cells[problem + "/apinn"].e2);
    const double p = median(g_cells[problem + "/pinn"].e2);
    pass = pass && a < p;
    detail += problem + ": apinn E2 " + fmt("%.3e", a) + " vs pinn E2 " + fmt("%.3e", p) + "; ";
  }
  report("6 A-PINN beats PINN on E2 (p1, p3 medians)", pass, detail);
}

void criterion_7_apinn_vs_fdm(const std::string& out_dir) {
  bool pass = true;
  std::string detail;
  for (const std::string problem : {"p2", "p3"}) {
    ExperimentConfig config = default_config(problem, "fdm");
    config.out_dir = out_dir;
    const ErrorReport fdm_report = cmd_evaluate(config);
    const double a = median(g_cells[problem + "/apinn"].e3);
    pass = pass && a < fdm_report.e3;
    detail += problem + ": apinn E3 " + fmt("%.3e", a) + " vs fdm E3 " +
              fmt("%.3e", fdm_report.e3) + "; ";
  }
  report("7 trained A-PINN beats FDM on E3 (p2, p3)", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: metric identities and trial-function constraint exactness
// ---------------------------------------------------------------------------

void criterion_8_property_suites() {
  // metric identities on a synthetic prediction
  const ProblemSpec prob = p2();
  const FieldSampler pred = [&prob](double x, double t) {
    return prob.exact(x, t) + 0.05 * std::sin(3 * x + t) + 0.01 * x;
  };
  const EvalGrid grid = eval_grid(prob, 31, 17);
  const auto rep = compute_errors(pred, prob, grid, "synthetic");
  double mean_sq = 0.0, max_e = 0.0;
  for (double e : rep.e1) {
    mean_sq += e * e;
    max_e = std::max(max_e, e);
  }
  mean_sq /= static_cast<double>(rep.e1.size());
  double diff_sq = 0.0, gt_sq = 0.0;
  for (double t : grid.ts) {
    for (double x : grid.xs) {
      const double d = pred(x, t) - prob.exact(x, t);
      diff_sq += d * d;
      gt_sq += prob.exact(x, t) * prob.exact(x, t);
    }
  }
  const bool metrics_ok = std::abs(rep.e2 - mean_sq) <= 1e-12 * std::max(1.0, mean_sq) &&
                          std::abs(rep.e4 - max_e) <= 1e-12 &&
                          std::abs(rep.e3 * std::sqrt(gt_sq) - std::sqrt(diff_sq)) <=
                              1e-12 * std::max(1.0, std::sqrt(diff_sq));

  // SANN constraint exactness: 1000 random nets, 10 probe points each
  double worst = 0.0;
  for (const auto& p : {p1(), p3()}) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const TrialModel trial = build_trial(p, seed);
      for (int k = 0; k < 10; ++k) {
        const double x = p.x_min + p.x_span() * rng_unit(seed, 90, static_cast<std::uint64_t>(k));
        const double t = p.t_max * rng_unit(seed, 91, static_cast<std::uint64_t>(k));
        worst = std::max(worst, std::abs(trial.value(x, 0.0) - p.ic_phi(x)));
        worst = std::max(worst, std::abs(trial.trial_jet(x, 0.0, Axis::T, 2).derivative(1)));
        worst = std::max(worst, std::abs(trial.value(p.x_min, t)));
        worst = std::max(worst, std::abs(trial.value(p.x_max, t)));
      }
    }
  }
  const bool sann_ok = worst < 1e-10;
  report("8 metric identities and trial-function constraint exactness", metrics_ok && sann_ok,
         std::string("identities ") + (metrics_ok ? "hold" : "broken") + ", constraint dev " +
             fmt("%.1e", worst) + " (tol 1e-10)");
}

// Supplemental slow op-example checks at published scale.
void supplemental_checks(const std::string& out_dir) {
  // SANN on p2 with the default schedule reaches a small residual
  {
    ExperimentConfig config = default_config("p2", "sann");
    config.out_dir = out_dir;
    config.seed = 0;
    config.sampling_seed = 0;
    const TrainOutcome outcome = cmd_train(config);
    report("s1 sann p2 default run residual <= 1e-3", outcome.report.final_loss.total <= 1e-3,
           "residual " + fmt("%.3e", outcome.report.final_loss.total));
  }
  // trained A-PINN p1 E2 lands inside the published bracket
  {
    const auto& cell = g_cells["p1/apinn"];
    if (!cell.e2.empty()) {
      const double e2 = median(cell.e2);
      report("s2 apinn p1 E2 within [1e-8, 1e-5]", e2 >= 1e-8 && e2 <= 1e-5,
             "median E2 " + fmt("%.3e", e2));
    }
  }
  // trained A-PINN p3 relative error is comfortably small
  {
    const auto& cell = g_cells["p3/apinn"];
    if (!cell.e3.empty()) {
      const double e3 = median(cell.e3);
      report("s3 apinn p3 E3 <= 5e-3", e3 <= 5e-3, "median E3 " + fmt("%.3e", e3));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir = "acceptance_out";
  if (const char* env = std::getenv("APINN_ACCEPTANCE_OUT")) out_dir = env;
  if (argc > 1) out_dir = argv[1];
  const std::vector<std::uint64_t> seeds = {0, 1, 2};

  std::printf("acceptance suite (artifacts in %s)\n", out_dir.c_str());
  criterion_1_ground_truth();
  criterion_2_residual_oracle();
  criterion_3_autodiff();
  criterion_4_fdm();
  criterion_5_training_quality(out_dir, seeds);
  criterion_6_apinn_vs_pinn(out_dir, seeds);
  criterion_7_apinn_vs_fdm(out_dir);
  criterion_8_property_suites();
  supplemental_checks(out_dir);

  std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures;
}
