#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "apinn/network.hpp"
#include "apinn/optim.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"

namespace apinn {

// Constraint-embedding baseline: the displacement is represented as
//
//   phi_tau(x, t) = alpha(x, t) + g(x, t) * net(x, t)
//
// with alpha(x,t) = phi(x) (exact for the benchmark problems, whose initial
// velocity vanishes and whose initial deflection vanishes at the ends) and
// the mask g(x, t) = (x - x_min)(x_max - x) t^2, which vanishes on the
// initial line and both boundaries and has zero time-derivative at t = 0.
// The ICs and the displacement BCs therefore hold exactly for any net; the
// curvature BC is left soft (untrained nets may violate it).
struct TrialModel {
  ProblemSpec problem;
  Params net;  // plain tanh MLP, 2 hidden x 20 by default

  double alpha(double x) const { return problem.ic_phi(x); }
  double mask(double x, double t) const {
    return (x - problem.x_min) * (problem.x_max - x) * t * t;
  }
  // Trial displacement value.
  double value(double x, double t) const;
  // Trial displacement as a jet along one axis (net differentiated by jets,
  // alpha and g by closed-form jet arithmetic).
  Jet trial_jet(double x, double t, Axis axis, int order) const;
};

// Builds the trial model around `problem`. Rejects problems with a nonzero
// initial velocity: this alpha cannot absorb them.
TrialModel build_trial(const ProblemSpec& problem, std::uint64_t seed = 0, int hidden_layers = 2,
                       int width = 20);

// A network stand-in for residual evaluation: maps seeded input jets to the
// output jet. Lets tests inject closed-form "networks".
using JetNetFn = std::function<Jet(const Jet& x, const Jet& t)>;

// Mean squared residual of the scaled operator applied to the trial function
// built from `net`, over the given interior points.
double sann_residual_loss(const ProblemSpec& problem, const JetNetFn& net,
                          std::span<const std::array<double, 2>> points);

double sann_residual_loss(const TrialModel& model,
                          std::span<const std::array<double, 2>> points);

// Minimizes the mean squared interior residual (no IC/BC terms; the trial
// function satisfies them by construction) with the shared Adam -> L-BFGS
// machinery. Gradients flow through the tape path.
std::pair<TrialModel, TrainReport> train_sann(const ProblemSpec& problem,
                                              const TrainSchedule& schedule,
                                              const CollocationSet& colloc, std::uint64_t seed,
                                              const EpochHook& on_epoch = nullptr);

}  // namespace apinn
