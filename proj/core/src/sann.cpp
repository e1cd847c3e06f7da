#include "apinn/sann.hpp"

#include <cmath>
#include <stdexcept>

#include "apinn/tape.hpp"

namespace apinn {

namespace {

// alpha and mask lifted to jet arithmetic along one axis.
Jet alpha_jet(const ProblemSpec& p, double x, double t, Axis axis, int order) {
  (void)t;
  if (axis == Axis::X && order >= 1) return p.phi_jet(Jet::variable(x, order));
  return p.phi_jet(Jet::constant(x, order));
}

Jet mask_jet(const ProblemSpec& p, double x, double t, Axis axis, int order) {
  if (axis == Axis::X && order >= 1) {
    const Jet xj = Jet::variable(x, order);
    return (xj - p.x_min) * (p.x_max - xj) * (t * t);
  }
  const Jet tj = (axis == Axis::T && order >= 1) ? Jet::variable(t, order) : Jet::constant(t, order);
  return (tj * tj) * ((x - p.x_min) * (p.x_max - x));
}

double residual_from_jets(const ProblemSpec& p, const Jet& trial_x, const Jet& trial_t, double x,
                          double t) {
  return p.c_sq * trial_x.derivative(4) + trial_t.derivative(2) + p.kappa * trial_x.derivative(0) -
         p.forcing(x, t);
}

}  // namespace

double TrialModel::value(double x, double t) const {
  return alpha(x) + mask(x, t) * forward(net, x, t)[0];
}

Jet TrialModel::trial_jet(double x, double t, Axis axis, int order) const {
  const Jet n = forward_jet(net, x, t, axis, order)[0];
  return alpha_jet(problem, x, t, axis, order) + mask_jet(problem, x, t, axis, order) * n;
}

TrialModel build_trial(const ProblemSpec& problem, std::uint64_t seed, int hidden_layers,
                       int width) {
  for (int i = 0; i <= 16; ++i) {
    const double x = problem.x_min + problem.x_span() * i / 16.0;
    if (std::abs(problem.ic_phi_t(x)) > 1e-14) {
      throw std::invalid_argument(
          "trial function alpha(x,t) = phi(x) requires zero initial velocity");
    }
  }
  MlpConfig config;
  config.hidden_layers = hidden_layers;
  config.width = width;
  config.outputs = 1;
  return {problem, init_params(config, seed)};
}

double sann_residual_loss(const ProblemSpec& problem, const JetNetFn& net,
                          std::span<const std::array<double, 2>> points) {
  if (points.empty()) throw std::invalid_argument("sann residual needs interior points");
  double acc = 0.0;
  for (const auto& [x, t] : points) {
    const Jet nx = net(Jet::variable(x, 4), Jet::constant(t, 4));
    const Jet trial_x = alpha_jet(problem, x, t, Axis::X, 4) + mask_jet(problem, x, t, Axis::X, 4) * nx;
    const Jet nt = net(Jet::constant(x, 2), Jet::variable(t, 2));
    const Jet trial_t = alpha_jet(problem, x, t, Axis::T, 2) + mask_jet(problem, x, t, Axis::T, 2) * nt;
    const double r = residual_from_jets(problem, trial_x, trial_t, x, t);
    acc += r * r;
  }
  return acc / static_cast<double>(points.size());
}

double sann_residual_loss(const TrialModel& model,
                          std::span<const std::array<double, 2>> points) {
  if (points.empty()) throw std::invalid_argument("sann residual needs interior points");
  double acc = 0.0;
  for (const auto& [x, t] : points) {
    const double r = residual_from_jets(model.problem, model.trial_jet(x, t, Axis::X, 4),
                                        model.trial_jet(x, t, Axis::T, 2), x, t);
    acc += r * r;
  }
  return acc / static_cast<double>(points.size());
}

std::pair<TrialModel, TrainReport> train_sann(const ProblemSpec& problem,
                                              const TrainSchedule& schedule,
                                              const CollocationSet& colloc, std::uint64_t seed,
                                              const EpochHook& on_epoch) {
  if (colloc.interior.empty()) throw std::invalid_argument("sann training needs interior points");
  TrialModel model = build_trial(problem, seed);

  const auto& pts = colloc.interior;
  const double inv_n = 1.0 / static_cast<double>(pts.size());

  // residual loss on the tape; rebuilt per evaluation
  Params scratch = model.net;
  Tape tape(scratch);
  const auto oracle = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad, LossBreakdown* bd) {
    for (long i = 0; i < theta.size(); ++i) scratch.values[static_cast<std::size_t>(i)] = theta[i];
    tape.reset();
    Tape::NodeId sum = -1;
    for (const auto& [x, t] : pts) {
      // x pass, order 4
      const Tape::NodeId xi = tape.input(x, 4);
      tape.constant(Jet::constant(t, 4));
      const Tape::NodeId net_x = tape.network_forward(xi, xi + 1)[0];
      const Tape::NodeId trial_x =
          tape.add(tape.constant(alpha_jet(problem, x, t, Axis::X, 4)),
                   tape.mul(tape.constant(mask_jet(problem, x, t, Axis::X, 4)), net_x));
      // t pass, order 2
      const Tape::NodeId xc = tape.constant(Jet::constant(x, 2));
      tape.input(t, 2);
      const Tape::NodeId net_t = tape.network_forward(xc, xc + 1)[0];
      const Tape::NodeId trial_t =
          tape.add(tape.constant(alpha_jet(problem, x, t, Axis::T, 2)),
                   tape.mul(tape.constant(mask_jet(problem, x, t, Axis::T, 2)), net_t));

      Tape::NodeId r = tape.add(tape.scale(tape.extract(trial_x, 4), problem.c_sq),
                                tape.extract(trial_t, 2));
      if (problem.kappa != 0.0) {
        r = tape.add(r, tape.scale(tape.extract(trial_x, 0), problem.kappa));
      }
      r = tape.add_const(r, -problem.forcing(x, t));
      const Tape::NodeId sq = tape.mul(r, r);
      sum = (sum < 0) ? sq : tape.add(sum, sq);
    }
    const Tape::NodeId root = tape.scale(sum, inv_n);
    const auto g = tape.backward(root);
    for (long i = 0; i < grad.size(); ++i) grad[i] = g[static_cast<std::size_t>(i)];
    const double loss = tape.value(root).value();
    if (bd) {
      *bd = {};
      bd->l_f = loss;
      bd->total = loss;
    }
    return loss;
  };

  Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(
      model.net.values.data(), static_cast<long>(model.net.values.size()));
  TrainReport report = run_training(oracle, theta, schedule, nullptr, nullptr, on_epoch);
  report.seed = seed;
  Eigen::Map<Eigen::VectorXd>(model.net.values.data(), theta.size()) = theta;
  return {std::move(model), std::move(report)};
}

}  // namespace apinn
