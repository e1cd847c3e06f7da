#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "apinn/loss.hpp"
#include "apinn/network.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"

namespace apinn {

struct AdamState {
  Eigen::VectorXd m;  // first-moment running average
  Eigen::VectorXd v;  // second-moment running average
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(int dim) : m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)) {}
};

// One bias-corrected Adam update. Throws on a non-finite gradient.
void adam_step(AdamState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
               double learning_rate);

// Loss-and-gradient oracle: fills `grad`, returns the objective value and
// optionally the term breakdown.
using GradOracle =
    std::function<double(const Eigen::VectorXd& theta, Eigen::VectorXd& grad, LossBreakdown* bd)>;

struct LbfgsState {
  int memory = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_linesearch = 25;
  double curvature_min = 1e-10;  // s.y threshold for storing a pair

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  int consecutive_failures = 0;

  // last accepted loss/gradient (valid once stepped)
  double loss = 0.0;
  Eigen::VectorXd grad;
  bool primed = false;
};

struct LbfgsStepResult {
  double loss = 0.0;
  bool accepted = false;     // a step was taken
  bool phase_over = false;   // stationary point or 3 consecutive line-search failures
  LossBreakdown breakdown;
};

// One L-BFGS iteration: two-loop-recursion direction, strong-Wolfe line
// search (cubic-interpolation zoom), steepest-descent fallback with a halved
// trial step on failure. The (s, y) pair is stored only when s.y exceeds the
// curvature threshold.
LbfgsStepResult lbfgs_step(LbfgsState& state, Eigen::VectorXd& theta, const GradOracle& oracle);

struct TrainSchedule {
  int total_epochs = 10000;
  double adam_fraction = 0.8;     // remainder is L-BFGS refinement
  double learning_rate = 1e-3;
  double lr_decay = 0.5;          // applied at 25/50/75% of the Adam phase
  double early_stop_tol = 1e-12;  // |delta total| between consecutive epochs
  int reweight_interval = 100;    // adaptive weight cadence (Adam phase only)
  int checkpoint_interval = 0;    // 0 = off
  double divergence_limit = 1e6;

  int adam_epochs() const;
};

enum class StopReason { Completed, EarlyStop, Diverged, LineSearchFailed };
std::string to_string(StopReason reason);

struct TrainReport {
  std::vector<LossBreakdown> history;  // one entry per executed epoch
  LossBreakdown final_loss;            // equals history.back() when nonempty
  LossWeights final_weights;
  double wall_clock_sec = 0.0;
  std::uint64_t seed = 0;
  int epochs_executed = 0;
  StopReason stop_reason = StopReason::Completed;
};

// Checkpoint hook: (epoch, theta, adam_step_count).
using CheckpointHook = std::function<void(int, const Eigen::VectorXd&, std::int64_t)>;
// Reweight hook: given current theta, returns updated weights.
using ReweightHook = std::function<LossWeights(const Eigen::VectorXd& theta)>;
// Epoch hook: fires after each recorded epoch (streams training logs).
using EpochHook = std::function<void(int, const LossBreakdown&)>;

// Full-batch Adam phase followed by L-BFGS refinement (each L-BFGS iteration
// counts as one epoch). Early-stops when |delta total| < early_stop_tol.
// Adaptive weights, when a hook is given, update only during the Adam phase;
// the L-BFGS phase needs a frozen objective for its line search.
TrainReport run_training(const GradOracle& oracle, Eigen::VectorXd& theta,
                         const TrainSchedule& schedule, const ReweightHook& reweight = nullptr,
                         const CheckpointHook& checkpoint = nullptr,
                         const EpochHook& on_epoch = nullptr);

// Trains a PINN or A-PINN on one benchmark problem. Weight adaptation follows
// `weight_mode_adaptive`; `weights` supplies the starting multipliers.
std::pair<Params, TrainReport> train(const ProblemSpec& problem, ModelKind kind,
                                     const MlpConfig& config, const TrainSchedule& schedule,
                                     const CollocationSet& colloc, std::uint64_t seed,
                                     LossWeights weights = {}, bool weight_mode_adaptive = true,
                                     const CheckpointHook& checkpoint = nullptr,
                                     const EpochHook& on_epoch = nullptr);

}  // namespace apinn
