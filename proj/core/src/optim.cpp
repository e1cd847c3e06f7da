#include "apinn/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace apinn {

void adam_step(AdamState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
               double learning_rate) {
  if (!grad.allFinite()) throw std::runtime_error("adam_step: non-finite gradient");
  if (grad.size() != theta.size() || state.m.size() != theta.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  state.m = b1 * state.m + (1.0 - b1) * grad;
  state.v = b2 * state.v + (1.0 - b2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const auto m_hat = state.m / bc1;
  const auto v_hat = state.v / bc2;
  theta -= learning_rate * (m_hat.array() / (v_hat.array().sqrt() + state.epsilon)).matrix();
}

namespace {

struct LineSearchEval {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;  // directional derivative g . d
  Eigen::VectorXd theta;
  Eigen::VectorXd grad;
  LossBreakdown bd;
};

struct LineSearchOutcome {
  bool ok = false;
  LineSearchEval accepted;
};

class WolfeSearch {
 public:
  WolfeSearch(const GradOracle& oracle, const Eigen::VectorXd& theta0, const Eigen::VectorXd& d,
              double f0, double dphi0, double c1, double c2, int max_evals)
      : oracle_(oracle), theta0_(theta0), d_(d), f0_(f0), dphi0_(dphi0), c1_(c1), c2_(c2),
        max_evals_(max_evals) {}

  LineSearchOutcome run(double alpha_init) {
    LineSearchEval prev;
    prev.alpha = 0.0;
    prev.f = f0_;
    prev.dphi = dphi0_;

    double alpha = alpha_init;
    constexpr double kAlphaMax = 1e6;
    for (int iter = 0; evals_ < max_evals_; ++iter) {
      LineSearchEval cur = evaluate(alpha);
      if (!std::isfinite(cur.f)) {
        // overshoot into garbage: shrink hard toward the last good point
        alpha = 0.5 * (prev.alpha + alpha);
        if (alpha <= 1e-20) break;
        continue;
      }
      if (cur.f > f0_ + c1_ * alpha * dphi0_ || (iter > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.dphi) <= -c2_ * dphi0_) {
        return {true, std::move(cur)};
      }
      if (cur.dphi >= 0.0) {
        return zoom(cur, prev);
      }
      prev = std::move(cur);
      alpha = std::min(2.0 * alpha, kAlphaMax);
      if (prev.alpha >= kAlphaMax) break;
    }
    return {};
  }

 private:
  LineSearchEval evaluate(double alpha) {
    LineSearchEval e;
    e.alpha = alpha;
    e.theta = theta0_ + alpha * d_;
    e.grad.resize(theta0_.size());
    e.f = oracle_(e.theta, e.grad, &e.bd);
    e.dphi = e.grad.dot(d_);
    ++evals_;
    return e;
  }

  LineSearchOutcome zoom(LineSearchEval lo, LineSearchEval hi) {
    while (evals_ < max_evals_) {
      const double alpha = interpolate(lo, hi);
      LineSearchEval cur = evaluate(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + c1_ * alpha * dphi0_ || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.dphi) <= -c2_ * dphi0_) {
          return {true, std::move(cur)};
        }
        if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) {
          hi = std::move(lo);
        }
        lo = std::move(cur);
      }
      if (std::abs(hi.alpha - lo.alpha) < 1e-18 * std::max(1.0, std::abs(lo.alpha))) break;
    }
    return {};
  }

  // Cubic interpolation with a bisection safeguard.
  static double interpolate(const LineSearchEval& lo, const LineSearchEval& hi) {
    const double a0 = lo.alpha, f0 = lo.f, g0 = lo.dphi;
    const double a1 = hi.alpha, f1 = hi.f, g1 = hi.dphi;
    const double mid = 0.5 * (a0 + a1);
    if (!std::isfinite(f1) || !std::isfinite(g1)) return mid;
    const double d1 = g0 + g1 - 3.0 * (f0 - f1) / (a0 - a1);
    const double disc = d1 * d1 - g0 * g1;
    if (disc < 0.0) return mid;
    const double d2 = std::copysign(std::sqrt(disc), a1 - a0);
    double alpha = a1 - (a1 - a0) * (g1 + d2 - d1) / (g1 - g0 + 2.0 * d2);
    const double lo_b = std::min(a0, a1), hi_b = std::max(a0, a1);
    const double margin = 0.1 * (hi_b - lo_b);
    if (!std::isfinite(alpha) || alpha < lo_b + margin || alpha > hi_b - margin) return mid;
    return alpha;
  }

  const GradOracle& oracle_;
  const Eigen::VectorXd& theta0_;
  const Eigen::VectorXd& d_;
  double f0_;
  double dphi0_;
  double c1_;
  double c2_;
  int max_evals_;
  int evals_ = 0;
};

Eigen::VectorXd two_loop_direction(const LbfgsState& state, const Eigen::VectorXd& grad) {
  Eigen::VectorXd q = grad;
  const int m = static_cast<int>(state.history.size());
  std::vector<double> alpha(static_cast<std::size_t>(m));
  std::vector<double> rho(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    const auto& [s, y] = state.history[static_cast<std::size_t>(i)];
    rho[static_cast<std::size_t>(i)] = 1.0 / y.dot(s);
    alpha[static_cast<std::size_t>(i)] = rho[static_cast<std::size_t>(i)] * s.dot(q);
    q -= alpha[static_cast<std::size_t>(i)] * y;
  }
  if (m > 0) {
    const auto& [s, y] = state.history.back();
    q *= s.dot(y) / y.dot(y);
  }
  for (int i = 0; i < m; ++i) {
    const auto& [s, y] = state.history[static_cast<std::size_t>(i)];
    const double beta = rho[static_cast<std::size_t>(i)] * y.dot(q);
    q += (alpha[static_cast<std::size_t>(i)] - beta) * s;
  }
  return -q;
}

}  // namespace

LbfgsStepResult lbfgsStepImpl(LbfgsState& state, Eigen::VectorXd& theta, const GradOracle& oracle,
                              LossBreakdown* primed_bd) {
  if (!state.primed) {
    state.grad.resize(theta.size());
    LossBreakdown bd;
    state.loss = oracle(theta, state.grad, &bd);
    state.primed = true;
    if (primed_bd) *primed_bd = bd;
  }

  LbfgsStepResult result;
  result.loss = state.loss;

  const double gnorm = state.grad.norm();
  if (gnorm < 1e-13) {
    result.phase_over = true;  // stationary point: identity step
    result.accepted = false;
    return result;
  }

  Eigen::VectorXd d = two_loop_direction(state, state.grad);
  double dphi0 = d.dot(state.grad);
  if (!(dphi0 < 0.0)) {
    d = -state.grad;
    dphi0 = -gnorm * gnorm;
  }
  const double alpha_init = state.history.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

  WolfeSearch search(oracle, theta, d, state.loss, dphi0, state.wolfe_c1, state.wolfe_c2,
                     state.max_linesearch);
  LineSearchOutcome out = search.run(alpha_init);
  if (!out.ok) {
    // fall back to steepest descent with a halved trial step
    Eigen::VectorXd d_sd = -state.grad;
    WolfeSearch retry(oracle, theta, d_sd, state.loss, -gnorm * gnorm, state.wolfe_c1,
                      state.wolfe_c2, state.max_linesearch);
    out = retry.run(0.5 * alpha_init);
    if (out.ok) d = std::move(d_sd);
  }
  if (!out.ok) {
    state.consecutive_failures += 1;
    result.accepted = false;
    result.phase_over = (state.consecutive_failures >= 3);
    return result;
  }
  state.consecutive_failures = 0;

  Eigen::VectorXd s = out.accepted.theta - theta;
  Eigen::VectorXd y = out.accepted.grad - state.grad;
  if (s.dot(y) > state.curvature_min) {
    state.history.emplace_back(std::move(s), std::move(y));
    while (static_cast<int>(state.history.size()) > state.memory) state.history.pop_front();
  }

  theta = std::move(out.accepted.theta);
  state.loss = out.accepted.f;
  state.grad = std::move(out.accepted.grad);

  result.loss = state.loss;
  result.accepted = true;
  result.breakdown = out.accepted.bd;
  return result;
}

LbfgsStepResult lbfgs_step(LbfgsState& state, Eigen::VectorXd& theta, const GradOracle& oracle) {
  return lbfgsStepImpl(state, theta, oracle, nullptr);
}

int TrainSchedule::adam_epochs() const {
  const int n = static_cast<int>(std::llround(adam_fraction * total_epochs));
  return std::clamp(n, 0, total_epochs);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Completed: return "completed";
    case StopReason::EarlyStop: return "early_stop";
    case StopReason::Diverged: return "diverged";
    case StopReason::LineSearchFailed: return "line_search_failed";
  }
  throw std::logic_error("unknown stop reason");
}

TrainReport run_training(const GradOracle& oracle, Eigen::VectorXd& theta,
                         const TrainSchedule& schedule, const ReweightHook& reweight,
                         const CheckpointHook& checkpoint, const EpochHook& on_epoch) {
  const auto t_start = std::chrono::steady_clock::now();
  TrainReport report;
  report.history.reserve(static_cast<std::size_t>(std::max(schedule.total_epochs, 0)));

  const int adam_n = schedule.adam_epochs();
  AdamState adam(static_cast<int>(theta.size()));
  Eigen::VectorXd grad(theta.size());

  StopReason reason = StopReason::Completed;
  bool stopped = false;

  auto lr_at = [&schedule, adam_n](int epoch) {
    if (adam_n <= 0) return schedule.learning_rate;
    const int quarter = std::min(3, (4 * epoch) / adam_n);
    return schedule.learning_rate * std::pow(schedule.lr_decay, quarter);
  };

  auto diverged = [&schedule](double f) { return !std::isfinite(f) || f > schedule.divergence_limit; };

  for (int epoch = 0; epoch < adam_n && !stopped; ++epoch) {
    if (reweight && schedule.reweight_interval > 0 && epoch > 0 &&
        epoch % schedule.reweight_interval == 0) {
      report.final_weights = reweight(theta);
    }
    LossBreakdown bd;
    const double f = oracle(theta, grad, &bd);
    if (diverged(f) || !grad.allFinite()) {
      reason = StopReason::Diverged;
      stopped = true;
      break;
    }
    report.history.push_back(bd);
    if (on_epoch) on_epoch(static_cast<int>(report.history.size()) - 1, bd);
    const std::size_t n = report.history.size();
    if (n >= 2 && std::abs(report.history[n - 1].total - report.history[n - 2].total) <
                      schedule.early_stop_tol) {
      reason = StopReason::EarlyStop;
      stopped = true;
      break;
    }
    adam_step(adam, theta, grad, lr_at(epoch));
    if (checkpoint && schedule.checkpoint_interval > 0 &&
        (epoch + 1) % schedule.checkpoint_interval == 0) {
      checkpoint(epoch + 1, theta, adam.step);
    }
  }

  if (!stopped) {
    LbfgsState lbfgs;
    for (int epoch = adam_n; epoch < schedule.total_epochs; ++epoch) {
      LbfgsStepResult step = lbfgsStepImpl(lbfgs, theta, oracle, nullptr);
      if (diverged(step.loss)) {
        reason = StopReason::Diverged;
        break;
      }
      if (step.phase_over && !step.accepted) {
        reason = (lbfgs.consecutive_failures >= 3) ? StopReason::LineSearchFailed
                                                   : StopReason::EarlyStop;
        break;
      }
      if (!step.accepted) continue;  // failed search, retrying (not yet 3 in a row)
      report.history.push_back(step.breakdown);
      if (on_epoch) on_epoch(static_cast<int>(report.history.size()) - 1, step.breakdown);
      const std::size_t n = report.history.size();
      if (n >= 2 && std::abs(report.history[n - 1].total - report.history[n - 2].total) <
                        schedule.early_stop_tol) {
        reason = StopReason::EarlyStop;
        break;
      }
      if (checkpoint && schedule.checkpoint_interval > 0 &&
          static_cast<int>(n) % schedule.checkpoint_interval == 0) {
        checkpoint(static_cast<int>(n), theta, adam.step);
      }
    }
  }

  report.epochs_executed = static_cast<int>(report.history.size());
  if (!report.history.empty()) report.final_loss = report.history.back();
  report.stop_reason = reason;
  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::pair<Params, TrainReport> train(const ProblemSpec& problem, ModelKind kind,
                                     const MlpConfig& config, const TrainSchedule& schedule,
                                     const CollocationSet& colloc, std::uint64_t seed,
                                     LossWeights weights, bool weight_mode_adaptive,
                                     const CheckpointHook& checkpoint, const EpochHook& on_epoch) {
  if (kind != ModelKind::Pinn && kind != ModelKind::Apinn) {
    throw std::invalid_argument("train() handles PINN and A-PINN models");
  }
  MlpConfig cfg = config;
  cfg.outputs = (kind == ModelKind::Apinn) ? 2 : 1;

  BeamLossObjective objective(problem, colloc, kind, cfg);
  Params params = init_params(cfg, seed);
  Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(params.values.data(), static_cast<long>(params.values.size()));

  const auto oracle = [&objective, &weights](const Eigen::VectorXd& th, Eigen::VectorXd& g,
                                             LossBreakdown* bd) {
    return objective.eval({th.data(), static_cast<std::size_t>(th.size())}, weights,
                          {g.data(), static_cast<std::size_t>(g.size())}, bd);
  };

  ReweightHook hook = nullptr;
  if (weight_mode_adaptive) {
    hook = [&objective, &weights](const Eigen::VectorXd& th) {
      const auto norms =
          objective.term_grad_norms({th.data(), static_cast<std::size_t>(th.size())});
      weights = adaptive_reweight({}, norms, weights);
      return weights;
    };
  }

  TrainReport report = run_training(oracle, theta, schedule, hook, checkpoint, on_epoch);
  report.seed = seed;
  report.final_weights = weights;

  Eigen::Map<Eigen::VectorXd>(params.values.data(), theta.size()) = theta;
  return {std::move(params), std::move(report)};
}

}  // namespace apinn
