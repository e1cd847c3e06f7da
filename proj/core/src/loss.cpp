#include "apinn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "batch_engine.hpp"

namespace apinn {

namespace {

double req(const std::optional<double>& v, const char* name) {
  if (!v.has_value()) throw std::logic_error(std::string("DerivBundle entry missing: ") + name);
  return *v;
}

void check_regions(const CollocationSet& colloc, bool need_aux) {
  if (colloc.interior.empty() || colloc.boundary.empty() || colloc.initial.empty()) {
    throw std::invalid_argument("collocation set has an empty region");
  }
  if (need_aux && colloc.auxiliary.empty()) {
    throw std::invalid_argument("A-PINN loss needs auxiliary points");
  }
}

double weighted_total(const LossBreakdown& b, const LossWeights& w) {
  return w.w_f * b.l_f + w.w_b * b.l_b + w.w_0 * b.l_0 + w.w_d * b.l_d + w.w_a * b.l_a;
}

double boundary_x(const ProblemSpec& p, const BoundaryPoint& bp) {
  return bp.end == 0 ? p.x_min : p.x_max;
}

LossBreakdown field_loss(const FieldEval& field, const ProblemSpec& p, const CollocationSet& colloc,
                         const LossWeights& w, ModelKind kind, std::span<const DataPoint> data) {
  check_regions(colloc, kind == ModelKind::Apinn);
  const bool aux = (kind == ModelKind::Apinn);
  LossBreakdown b;

  for (const auto& [x, t] : colloc.interior) {
    const DerivBundle d = field.derivs(x, t, kind);
    const double fourth = aux ? req(d.v_xx, "v_xx") : req(d.u_xxxx, "u_xxxx");
    const double r = p.c_sq * fourth + req(d.u_tt, "u_tt") + p.kappa * req(d.u, "u") - p.forcing(x, t);
    b.l_f += r * r;
  }
  b.l_f /= static_cast<double>(colloc.interior.size());

  if (aux) {
    for (const auto& [x, t] : colloc.auxiliary) {
      const DerivBundle d = field.derivs(x, t, kind);
      const double a = req(d.v, "v") - req(d.u_xx, "u_xx");
      b.l_a += a * a;
    }
    b.l_a /= static_cast<double>(colloc.auxiliary.size());
  }

  for (double x : colloc.initial) {
    const DerivBundle d = field.derivs(x, 0.0, kind);
    const double du = req(d.u, "u") - p.ic_phi(x);
    const double dv = req(d.u_t, "u_t") - p.ic_phi_t(x);
    b.l_0 += du * du + dv * dv;
  }
  b.l_0 /= static_cast<double>(colloc.initial.size());

  for (const auto& bp : colloc.boundary) {
    const DerivBundle d = field.derivs(boundary_x(p, bp), bp.t, kind);
    const double u = req(d.u, "u");
    const double second = aux ? req(d.v, "v") : req(d.u_xx, "u_xx");
    b.l_b += u * u + second * second;
  }
  b.l_b /= static_cast<double>(colloc.boundary.size());

  if (!data.empty()) {
    for (const auto& dp : data) {
      const double m = req(field.derivs(dp.x, dp.t, kind).u, "u") - dp.u;
      b.l_d += m * m;
    }
    b.l_d /= static_cast<double>(data.size());
  }

  b.total = weighted_total(b, w);
  return b;
}

}  // namespace

LossBreakdown pinn_loss(const FieldEval& field, const ProblemSpec& problem,
                        const CollocationSet& colloc, const LossWeights& weights,
                        std::span<const DataPoint> data) {
  return field_loss(field, problem, colloc, weights, ModelKind::Pinn, data);
}

LossBreakdown apinn_loss(const FieldEval& field, const ProblemSpec& problem,
                         const CollocationSet& colloc, const LossWeights& weights,
                         std::span<const DataPoint> data) {
  return field_loss(field, problem, colloc, weights, ModelKind::Apinn, data);
}

LossBreakdown pinn_loss(const Params& params, const ProblemSpec& problem,
                        const CollocationSet& colloc, const LossWeights& weights) {
  if (params.config.outputs != 1) {
    throw std::invalid_argument("pinn_loss expects a 1-output network");
  }
  return pinn_loss(NetworkField(params), problem, colloc, weights);
}

LossBreakdown apinn_loss(const Params& params, const ProblemSpec& problem,
                         const CollocationSet& colloc, const LossWeights& weights) {
  if (params.config.outputs != 2) {
    throw std::invalid_argument("apinn_loss expects a 2-output network");
  }
  return apinn_loss(NetworkField(params), problem, colloc, weights);
}

double data_loss(const Params& params, std::span<const DataPoint> dataset) {
  if (dataset.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& dp : dataset) {
    const double m = forward(params, dp.x, dp.t)[0] - dp.u;
    acc += m * m;
  }
  return acc / static_cast<double>(dataset.size());
}

LossWeights adaptive_reweight(const LossBreakdown& /*breakdown*/, const TermGradNorms& grad_norms,
                              const LossWeights& current) {
  const double norms[5] = {grad_norms.g_f, grad_norms.g_b, grad_norms.g_0, grad_norms.g_d,
                           grad_norms.g_a};
  double max_norm = 0.0;
  for (double n : norms) {
    if (!std::isfinite(n)) throw std::invalid_argument("gradient norms must be finite");
    max_norm = std::max(max_norm, n);
  }
  if (max_norm == 0.0) throw std::invalid_argument("all term gradient norms are zero");

  constexpr double kAlpha = 0.1;
  constexpr double kLo = 1e-2;
  constexpr double kHi = 1e2;
  const double cur[5] = {current.w_f, current.w_b, current.w_0, current.w_d, current.w_a};
  double next[5];
  for (int k = 0; k < 5; ++k) {
    if (norms[k] == 0.0) {
      next[k] = cur[k];
    } else {
      next[k] = std::clamp((1.0 - kAlpha) * cur[k] + kAlpha * (max_norm / norms[k]), kLo, kHi);
    }
  }
  return {next[0], next[1], next[2], next[3], next[4]};
}

// ---------------------------------------------------------------------------
// Tape path
// ---------------------------------------------------------------------------

namespace {

// Shared residual assembly: fourth_order is u_xxxx (PINN) or v_xx (A-PINN).
Tape::NodeId residual_node(Tape& tape, const ProblemSpec& p, Tape::NodeId fourth,
                           Tape::NodeId u_tt, Tape::NodeId u_val, double f) {
  Tape::NodeId r = tape.add(tape.scale(fourth, p.c_sq), u_tt);
  if (p.kappa != 0.0) r = tape.add(r, tape.scale(u_val, p.kappa));
  return tape.add_const(r, -f);
}

Tape::NodeId mean_node(Tape& tape, Tape::NodeId sum, std::size_t n) {
  return tape.scale(sum, 1.0 / static_cast<double>(n));
}

}  // namespace

TapeLossNodes build_loss_tape(Tape& tape, const ProblemSpec& problem,
                              const CollocationSet& colloc, const LossWeights& weights,
                              ModelKind kind, std::span<const DataPoint> data) {
  const bool aux = (kind == ModelKind::Apinn);
  if (!aux && kind != ModelKind::Pinn) {
    throw std::invalid_argument("tape loss supports PINN and A-PINN kinds");
  }
  check_regions(colloc, aux);
  const auto& config = tape.params().config;
  if ((aux && config.outputs != 2) || (!aux && config.outputs != 1)) {
    throw std::invalid_argument("network output arity does not match model kind");
  }

  const int x_order = aux ? 2 : 4;
  TapeLossNodes nodes;

  Tape::NodeId sum_f = -1;
  for (const auto& [x, t] : colloc.interior) {
    const Tape::NodeId xi = tape.input(x, x_order);
    tape.constant(Jet::constant(t, x_order));
    const auto outs_x = tape.network_forward(xi, xi + 1);
    const Tape::NodeId xc = tape.constant(Jet::constant(x, 2));
    tape.input(t, 2);
    const auto outs_t = tape.network_forward(xc, xc + 1);

    const Tape::NodeId fourth =
        aux ? tape.extract(outs_x[1], 2) : tape.extract(outs_x[0], 4);
    const Tape::NodeId r = residual_node(tape, problem, fourth, tape.extract(outs_t[0], 2),
                                         tape.extract(outs_x[0], 0), problem.forcing(x, t));
    const Tape::NodeId sq = tape.mul(r, r);
    sum_f = (sum_f < 0) ? sq : tape.add(sum_f, sq);
  }
  nodes.l_f = mean_node(tape, sum_f, colloc.interior.size());

  if (aux) {
    Tape::NodeId sum_a = -1;
    for (const auto& [x, t] : colloc.auxiliary) {
      const Tape::NodeId xi = tape.input(x, 2);
      tape.constant(Jet::constant(t, 2));
      const auto outs = tape.network_forward(xi, xi + 1);
      const Tape::NodeId d = tape.sub(tape.extract(outs[1], 0), tape.extract(outs[0], 2));
      const Tape::NodeId sq = tape.mul(d, d);
      sum_a = (sum_a < 0) ? sq : tape.add(sum_a, sq);
    }
    nodes.l_a = mean_node(tape, sum_a, colloc.auxiliary.size());
  } else {
    nodes.l_a = tape.constant(0.0, 0);
  }

  Tape::NodeId sum_0 = -1;
  for (double x : colloc.initial) {
    const Tape::NodeId xc = tape.constant(Jet::constant(x, 1));
    tape.input(0.0, 1);
    const auto outs = tape.network_forward(xc, xc + 1);
    const Tape::NodeId du = tape.add_const(tape.extract(outs[0], 0), -problem.ic_phi(x));
    const Tape::NodeId dv = tape.add_const(tape.extract(outs[0], 1), -problem.ic_phi_t(x));
    const Tape::NodeId sq = tape.add(tape.mul(du, du), tape.mul(dv, dv));
    sum_0 = (sum_0 < 0) ? sq : tape.add(sum_0, sq);
  }
  nodes.l_0 = mean_node(tape, sum_0, colloc.initial.size());

  Tape::NodeId sum_b = -1;
  for (const auto& bp : colloc.boundary) {
    const double bx = boundary_x(problem, bp);
    Tape::NodeId u, second;
    if (aux) {
      const Tape::NodeId xc = tape.constant(Jet::constant(bx, 0));
      tape.constant(Jet::constant(bp.t, 0));
      const auto outs = tape.network_forward(xc, xc + 1);
      u = tape.extract(outs[0], 0);
      second = tape.extract(outs[1], 0);
    } else {
      const Tape::NodeId xi = tape.input(bx, 2);
      tape.constant(Jet::constant(bp.t, 2));
      const auto outs = tape.network_forward(xi, xi + 1);
      u = tape.extract(outs[0], 0);
      second = tape.extract(outs[0], 2);
    }
    const Tape::NodeId sq = tape.add(tape.mul(u, u), tape.mul(second, second));
    sum_b = (sum_b < 0) ? sq : tape.add(sum_b, sq);
  }
  nodes.l_b = mean_node(tape, sum_b, colloc.boundary.size());

  if (!data.empty()) {
    Tape::NodeId sum_d = -1;
    for (const auto& dp : data) {
      const Tape::NodeId xc = tape.constant(Jet::constant(dp.x, 0));
      tape.constant(Jet::constant(dp.t, 0));
      const auto outs = tape.network_forward(xc, xc + 1);
      const Tape::NodeId m = tape.add_const(tape.extract(outs[0], 0), -dp.u);
      const Tape::NodeId sq = tape.mul(m, m);
      sum_d = (sum_d < 0) ? sq : tape.add(sum_d, sq);
    }
    nodes.l_d = mean_node(tape, sum_d, data.size());
  } else {
    nodes.l_d = tape.constant(0.0, 0);
  }

  Tape::NodeId total = tape.scale(nodes.l_f, weights.w_f);
  total = tape.add(total, tape.scale(nodes.l_b, weights.w_b));
  total = tape.add(total, tape.scale(nodes.l_0, weights.w_0));
  total = tape.add(total, tape.scale(nodes.l_d, weights.w_d));
  total = tape.add(total, tape.scale(nodes.l_a, weights.w_a));
  nodes.total = total;
  return nodes;
}

// ---------------------------------------------------------------------------
// Batched training objective
// ---------------------------------------------------------------------------

namespace detail {

struct BeamLossState {
  ProblemSpec problem;
  ModelKind kind = ModelKind::Apinn;
  MlpConfig config;
  int dim = 0;

  int n_f = 0, n_a = 0, n_0 = 0, n_b2 = 0;  // n_b2 counts both ends

  PassBatch interior_x;  // order 4 (PINN) or 2 (A-PINN)
  PassBatch interior_t;  // order 2
  PassBatch aux_x;       // order 2, A-PINN only
  PassBatch initial_t;   // order 1
  PassBatch bound;       // order 2 along x (PINN) or order 0 (A-PINN)
  PassBatch data_pass;   // order 0

  std::vector<DataPoint> data;
  std::vector<double> f_interior, phi0, phit0;

  // residual scratch, filled by compute_terms
  std::vector<double> res_f, res_a, res_0u, res_0t, res_bu, res_bw, res_d;

  std::vector<double> scratch_grad;

  bool is_aux() const { return kind == ModelKind::Apinn; }

  void forward_all(std::span<const double> theta) {
    interior_x.forward(theta);
    interior_t.forward(theta);
    if (is_aux()) aux_x.forward(theta);
    initial_t.forward(theta);
    bound.forward(theta);
    if (!data.empty()) data_pass.forward(theta);
  }

  LossBreakdown compute_terms() {
    const bool aux = is_aux();
    LossBreakdown b;
    for (int p = 0; p < n_f; ++p) {
      const double fourth = aux ? interior_x.deriv(1, p, 2) : interior_x.deriv(0, p, 4);
      const double r = problem.c_sq * fourth + interior_t.deriv(0, p, 2) +
                       problem.kappa * interior_x.deriv(0, p, 0) -
                       f_interior[static_cast<std::size_t>(p)];
      res_f[static_cast<std::size_t>(p)] = r;
      b.l_f += r * r;
    }
    b.l_f /= n_f;

    if (aux) {
      for (int p = 0; p < n_a; ++p) {
        const double a = aux_x.deriv(1, p, 0) - aux_x.deriv(0, p, 2);
        res_a[static_cast<std::size_t>(p)] = a;
        b.l_a += a * a;
      }
      b.l_a /= n_a;
    }

    for (int p = 0; p < n_0; ++p) {
      const double du = initial_t.deriv(0, p, 0) - phi0[static_cast<std::size_t>(p)];
      const double dv = initial_t.deriv(0, p, 1) - phit0[static_cast<std::size_t>(p)];
      res_0u[static_cast<std::size_t>(p)] = du;
      res_0t[static_cast<std::size_t>(p)] = dv;
      b.l_0 += du * du + dv * dv;
    }
    b.l_0 /= n_0;

    for (int p = 0; p < n_b2; ++p) {
      const double u = bound.deriv(0, p, 0);
      const double w = aux ? bound.deriv(1, p, 0) : bound.deriv(0, p, 2);
      res_bu[static_cast<std::size_t>(p)] = u;
      res_bw[static_cast<std::size_t>(p)] = w;
      b.l_b += u * u + w * w;
    }
    b.l_b /= n_b2;

    if (!data.empty()) {
      for (std::size_t p = 0; p < data.size(); ++p) {
        const double m = data_pass.deriv(0, static_cast<int>(p), 0) - data[p].u;
        res_d[p] = m;
        b.l_d += m * m;
      }
      b.l_d /= static_cast<double>(data.size());
    }
    return b;
  }

  // Seeds d(total)/d(outputs) given per-term multipliers (the active weights,
  // or a single 1 when isolating one term).
  void seed(double w_f, double w_b, double w_0, double w_d, double w_a) {
    const bool aux = is_aux();
    interior_x.clear_seeds();
    interior_t.clear_seeds();
    if (aux) aux_x.clear_seeds();
    initial_t.clear_seeds();
    bound.clear_seeds();
    if (!data.empty()) data_pass.clear_seeds();

    if (w_f != 0.0) {
      const double scale = 2.0 * w_f / n_f;
      for (int p = 0; p < n_f; ++p) {
        const double s = scale * res_f[static_cast<std::size_t>(p)];
        if (aux) {
          interior_x.seed_deriv(1, p, 2, problem.c_sq * s);
        } else {
          interior_x.seed_deriv(0, p, 4, problem.c_sq * s);
        }
        interior_t.seed_deriv(0, p, 2, s);
        if (problem.kappa != 0.0) interior_x.seed_deriv(0, p, 0, problem.kappa * s);
      }
    }
    if (aux && w_a != 0.0) {
      const double scale = 2.0 * w_a / n_a;
      for (int p = 0; p < n_a; ++p) {
        const double s = scale * res_a[static_cast<std::size_t>(p)];
        aux_x.seed_deriv(1, p, 0, s);
        aux_x.seed_deriv(0, p, 2, -s);
      }
    }
    if (w_0 != 0.0) {
      const double scale = 2.0 * w_0 / n_0;
      for (int p = 0; p < n_0; ++p) {
        initial_t.seed_deriv(0, p, 0, scale * res_0u[static_cast<std::size_t>(p)]);
        initial_t.seed_deriv(0, p, 1, scale * res_0t[static_cast<std::size_t>(p)]);
      }
    }
    if (w_b != 0.0) {
      const double scale = 2.0 * w_b / n_b2;
      for (int p = 0; p < n_b2; ++p) {
        bound.seed_deriv(0, p, 0, scale * res_bu[static_cast<std::size_t>(p)]);
        if (is_aux()) {
          bound.seed_deriv(1, p, 0, scale * res_bw[static_cast<std::size_t>(p)]);
        } else {
          bound.seed_deriv(0, p, 2, scale * res_bw[static_cast<std::size_t>(p)]);
        }
      }
    }
    if (!data.empty() && w_d != 0.0) {
      const double scale = 2.0 * w_d / static_cast<double>(data.size());
      for (std::size_t p = 0; p < data.size(); ++p) {
        data_pass.seed_deriv(0, static_cast<int>(p), 0, scale * res_d[p]);
      }
    }
  }

  void backward_all(std::span<const double> theta, std::span<double> grad) {
    interior_x.backward(theta, grad);
    interior_t.backward(theta, grad);
    if (is_aux()) aux_x.backward(theta, grad);
    initial_t.backward(theta, grad);
    bound.backward(theta, grad);
    if (!data.empty()) data_pass.backward(theta, grad);
  }
};

}  // namespace detail

BeamLossObjective::BeamLossObjective(const ProblemSpec& problem, const CollocationSet& colloc,
                                     ModelKind kind, const MlpConfig& config)
    : state_(std::make_unique<detail::BeamLossState>()) {
  const bool aux = (kind == ModelKind::Apinn);
  if (!aux && kind != ModelKind::Pinn) {
    throw std::invalid_argument("training objective supports PINN and A-PINN kinds");
  }
  if ((aux && config.outputs != 2) || (!aux && config.outputs != 1)) {
    throw std::invalid_argument("network output arity does not match model kind");
  }
  check_regions(colloc, aux);

  auto& s = *state_;
  s.problem = problem;
  s.kind = kind;
  s.config = config;
  s.dim = param_count(config);
  s.n_f = static_cast<int>(colloc.interior.size());
  s.n_a = static_cast<int>(colloc.auxiliary.size());
  s.n_0 = static_cast<int>(colloc.initial.size());
  s.n_b2 = static_cast<int>(colloc.boundary.size());

  std::vector<double> xs, ts;
  auto split = [&xs, &ts](const std::vector<std::array<double, 2>>& pts) {
    xs.clear();
    ts.clear();
    for (const auto& [x, t] : pts) {
      xs.push_back(x);
      ts.push_back(t);
    }
  };

  split(colloc.interior);
  s.interior_x.init(config, xs, ts, Axis::X, aux ? 2 : 4);
  s.interior_t.init(config, xs, ts, Axis::T, 2);
  s.f_interior.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) s.f_interior[i] = problem.forcing(xs[i], ts[i]);

  if (aux) {
    split(colloc.auxiliary);
    s.aux_x.init(config, xs, ts, Axis::X, 2);
  }

  xs.assign(colloc.initial.begin(), colloc.initial.end());
  ts.assign(colloc.initial.size(), 0.0);
  s.initial_t.init(config, xs, ts, Axis::T, 1);
  s.phi0.resize(xs.size());
  s.phit0.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s.phi0[i] = problem.ic_phi(xs[i]);
    s.phit0[i] = problem.ic_phi_t(xs[i]);
  }

  xs.clear();
  ts.clear();
  for (const auto& bp : colloc.boundary) {
    xs.push_back(boundary_x(problem, bp));
    ts.push_back(bp.t);
  }
  s.bound.init(config, xs, ts, Axis::X, aux ? 0 : 2);

  s.res_f.resize(static_cast<std::size_t>(s.n_f));
  s.res_a.resize(static_cast<std::size_t>(s.n_a));
  s.res_0u.resize(static_cast<std::size_t>(s.n_0));
  s.res_0t.resize(static_cast<std::size_t>(s.n_0));
  s.res_bu.resize(static_cast<std::size_t>(s.n_b2));
  s.res_bw.resize(static_cast<std::size_t>(s.n_b2));
  s.scratch_grad.resize(static_cast<std::size_t>(s.dim));
}

BeamLossObjective::~BeamLossObjective() = default;
BeamLossObjective::BeamLossObjective(BeamLossObjective&&) noexcept = default;
BeamLossObjective& BeamLossObjective::operator=(BeamLossObjective&&) noexcept = default;

int BeamLossObjective::dim() const { return state_->dim; }
ModelKind BeamLossObjective::kind() const { return state_->kind; }

void BeamLossObjective::set_dataset(std::vector<DataPoint> data) {
  auto& s = *state_;
  s.data = std::move(data);
  if (!s.data.empty()) {
    std::vector<double> xs, ts;
    for (const auto& dp : s.data) {
      xs.push_back(dp.x);
      ts.push_back(dp.t);
    }
    s.data_pass.init(s.config, xs, ts, Axis::X, 0);
    s.res_d.resize(s.data.size());
  }
}

double BeamLossObjective::eval(std::span<const double> theta, const LossWeights& weights,
                               std::span<double> grad, LossBreakdown* breakdown) {
  auto& s = *state_;
  if (static_cast<int>(theta.size()) != s.dim) {
    throw std::invalid_argument("theta size does not match network shape");
  }
  s.forward_all(theta);
  LossBreakdown b = s.compute_terms();
  b.total = weighted_total(b, weights);
  if (!grad.empty()) {
    if (static_cast<int>(grad.size()) != s.dim) {
      throw std::invalid_argument("grad size does not match network shape");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    s.seed(weights.w_f, weights.w_b, weights.w_0, weights.w_d, weights.w_a);
    s.backward_all(theta, grad);
  }
  if (breakdown) *breakdown = b;
  return b.total;
}

LossBreakdown BeamLossObjective::value(std::span<const double> theta, const LossWeights& weights) {
  LossBreakdown b;
  eval(theta, weights, {}, &b);
  return b;
}

TermGradNorms BeamLossObjective::term_grad_norms(std::span<const double> theta) {
  auto& s = *state_;
  if (static_cast<int>(theta.size()) != s.dim) {
    throw std::invalid_argument("theta size does not match network shape");
  }
  s.forward_all(theta);
  s.compute_terms();

  auto norm_for = [&s, theta](double wf, double wb, double w0, double wd, double wa) {
    std::fill(s.scratch_grad.begin(), s.scratch_grad.end(), 0.0);
    s.seed(wf, wb, w0, wd, wa);
    s.backward_all(theta, s.scratch_grad);
    double acc = 0.0;
    for (double g : s.scratch_grad) acc += g * g;
    return std::sqrt(acc);
  };

  TermGradNorms n;
  n.g_f = norm_for(1, 0, 0, 0, 0);
  n.g_b = norm_for(0, 1, 0, 0, 0);
  n.g_0 = norm_for(0, 0, 1, 0, 0);
  n.g_d = s.data.empty() ? 0.0 : norm_for(0, 0, 0, 1, 0);
  n.g_a = s.is_aux() ? norm_for(0, 0, 0, 0, 1) : 0.0;
  return n;
}

}  // namespace apinn
