#pragma once

#include <memory>
#include <span>
#include <vector>

#include "apinn/network.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"
#include "apinn/tape.hpp"

namespace apinn {

// Nonnegative multipliers for the composite loss terms (residual, boundary,
// initial, data, auxiliary). The data weight defaults to zero: the benchmark
// problems train without measured data.
struct LossWeights {
  double w_f = 1.0;
  double w_b = 1.0;
  double w_0 = 1.0;
  double w_d = 0.0;
  double w_a = 1.0;
};

struct LossBreakdown {
  double l_f = 0.0;
  double l_b = 0.0;
  double l_0 = 0.0;
  double l_d = 0.0;
  double l_a = 0.0;
  double total = 0.0;
};

struct DataPoint {
  double x = 0.0;
  double t = 0.0;
  double u = 0.0;
};

// L2 norms of the per-term parameter gradients, used for adaptive weighting.
struct TermGradNorms {
  double g_f = 0.0;
  double g_b = 0.0;
  double g_0 = 0.0;
  double g_d = 0.0;
  double g_a = 0.0;
};

// Composite PINN loss over a field:
//   l_f = mean over interior of (c^2 u_xxxx + u_tt + kappa u - f)^2
//   l_0 = mean over initial of |u - phi|^2 + |u_t - phi_t|^2
//   l_b = mean over all boundary rows of |u|^2 + |u_xx|^2
//   l_d = mean squared data misfit (0 without a dataset)
// The boundary mean runs over both ends together (2 n_b rows).
LossBreakdown pinn_loss(const FieldEval& field, const ProblemSpec& problem,
                        const CollocationSet& colloc, const LossWeights& weights,
                        std::span<const DataPoint> data = {});

// A-PINN variant: the fourth-order term runs through the auxiliary output,
//   l_f = mean over interior of (c^2 v_xx + u_tt + kappa u - f)^2
//   l_a = mean over auxiliary points of (v - u_xx)^2
// and the boundary curvature condition is enforced through v, not u_xx:
//   l_b = mean over all boundary rows of |u|^2 + |v|^2.
LossBreakdown apinn_loss(const FieldEval& field, const ProblemSpec& problem,
                         const CollocationSet& colloc, const LossWeights& weights,
                         std::span<const DataPoint> data = {});

LossBreakdown pinn_loss(const Params& params, const ProblemSpec& problem,
                        const CollocationSet& colloc, const LossWeights& weights);
LossBreakdown apinn_loss(const Params& params, const ProblemSpec& problem,
                         const CollocationSet& colloc, const LossWeights& weights);

// Mean squared misfit against supervision samples; 0 for an empty dataset.
double data_loss(const Params& params, std::span<const DataPoint> dataset);

// One gradient-norm balancing step:
//   w_k <- (1 - alpha) w_k + alpha * max_j ||g_j|| / ||g_k||,  alpha = 0.1,
// clamped to [1e-2, 1e2]; terms with zero gradient keep their weight.
LossWeights adaptive_reweight(const LossBreakdown& breakdown, const TermGradNorms& grad_norms,
                              const LossWeights& current);

// The full composite loss expressed on a Tape (reference gradient path).
struct TapeLossNodes {
  Tape::NodeId total = -1;
  Tape::NodeId l_f = -1;
  Tape::NodeId l_b = -1;
  Tape::NodeId l_0 = -1;
  Tape::NodeId l_d = -1;
  Tape::NodeId l_a = -1;
};
TapeLossNodes build_loss_tape(Tape& tape, const ProblemSpec& problem,
                              const CollocationSet& colloc, const LossWeights& weights,
                              ModelKind kind, std::span<const DataPoint> data = {});

namespace detail {
struct BeamLossState;
}

// Full-batch loss and parameter gradient for training, batched over
// collocation points (Eigen matrix kernels; fixed evaluation order, so values
// are bit-reproducible run to run). This is the production twin of the Tape
// path; the two agree to rounding and are cross-checked in the test suite.
class BeamLossObjective {
 public:
  BeamLossObjective(const ProblemSpec& problem, const CollocationSet& colloc, ModelKind kind,
                    const MlpConfig& config);
  ~BeamLossObjective();
  BeamLossObjective(BeamLossObjective&&) noexcept;
  BeamLossObjective& operator=(BeamLossObjective&&) noexcept;

  int dim() const;
  ModelKind kind() const;

  // Weighted total; fills `grad` (size dim()) when nonempty.
  double eval(std::span<const double> theta, const LossWeights& weights, std::span<double> grad,
              LossBreakdown* breakdown = nullptr);

  // Raw term values only.
  LossBreakdown value(std::span<const double> theta, const LossWeights& weights);

  // Per-term gradient norms at `theta` (runs one backward pass per term).
  TermGradNorms term_grad_norms(std::span<const double> theta);

  void set_dataset(std::vector<DataPoint> data);

 private:
  std::unique_ptr<detail::BeamLossState> state_;
};

}  // namespace apinn
