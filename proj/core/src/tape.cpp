#include "apinn/tape.hpp"

#include <stdexcept>

namespace apinn {

namespace {
constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};
}

Tape::Tape(const Params& params) : params_(&params), views_(layer_views(params.config)) {}

Tape::NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_id(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
    throw std::out_of_range("tape node id out of range");
  }
}

Tape::NodeId Tape::constant(const Jet& value) {
  Node n;
  n.op = Op::Constant;
  n.val = value;
  return push(n);
}

Tape::NodeId Tape::constant(double value, int order) {
  return constant(Jet::constant(value, order));
}

Tape::NodeId Tape::param(int index) {
  if (index < 0 || index >= static_cast<int>(params_->values.size())) {
    throw std::out_of_range("parameter index out of range");
  }
  Node n;
  n.op = Op::Param;
  n.param_index = index;
  n.val = Jet::constant(params_->values[index], 0);
  return push(n);
}

Tape::NodeId Tape::input(double value, int order) {
  Node n;
  n.op = Op::Input;
  n.val = Jet::variable(value, order);
  return push(n);
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val + nodes_[b].val;
  return push(n);
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  Node n;
  n.op = Op::Sub;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val - nodes_[b].val;
  return push(n);
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val * nodes_[b].val;
  return push(n);
}

Tape::NodeId Tape::scale(NodeId a, double s) {
  check_id(a);
  Node n;
  n.op = Op::Scale;
  n.a = a;
  n.konst = s;
  n.val = nodes_[a].val * s;
  return push(n);
}

Tape::NodeId Tape::add_const(NodeId a, double c) {
  check_id(a);
  Node n;
  n.op = Op::AddConst;
  n.a = a;
  n.konst = c;
  n.val = nodes_[a].val + c;
  return push(n);
}

Tape::NodeId Tape::tanh(NodeId a) {
  check_id(a);
  Node n;
  n.op = Op::Tanh;
  n.a = a;
  n.val = tanh_with_cofactor(nodes_[a].val, &n.aux);
  return push(n);
}

Tape::NodeId Tape::sin(NodeId a) {
  check_id(a);
  Node n;
  n.op = Op::Sin;
  n.a = a;
  n.val = apinn::sin(nodes_[a].val);
  n.aux = apinn::cos(nodes_[a].val);
  return push(n);
}

Tape::NodeId Tape::cos(NodeId a) {
  check_id(a);
  Node n;
  n.op = Op::Cos;
  n.a = a;
  n.val = apinn::cos(nodes_[a].val);
  n.aux = -apinn::sin(nodes_[a].val);
  return push(n);
}

Tape::NodeId Tape::extract(NodeId a, int k) {
  check_id(a);
  Node n;
  n.op = Op::Extract;
  n.a = a;
  n.k = k;
  n.val = Jet::constant(nodes_[a].val.derivative(k), 0);
  return push(n);
}

Tape::NodeId Tape::affine_row(int layer, int row, NodeId first_input) {
  check_id(first_input);
  const auto& v = views_.at(static_cast<std::size_t>(layer));
  if (row < 0 || row >= v.rows) throw std::out_of_range("affine row out of range");
  check_id(first_input + v.cols - 1);

  const int order = nodes_[first_input].val.order();
  const double* w = &params_->values[v.weight_offset + static_cast<std::size_t>(row) * v.cols];
  Jet acc = Jet::constant(params_->values[v.bias_offset + row], order);
  for (int j = 0; j < v.cols; ++j) {
    if (nodes_[first_input + j].val.order() != order) {
      throw std::invalid_argument("affine inputs must share one jet order");
    }
    acc += w[j] * nodes_[first_input + j].val;
  }
  Node n;
  n.op = Op::AffineRow;
  n.a = first_input;
  n.layer = layer;
  n.row = row;
  n.val = acc;
  return push(n);
}

std::vector<Tape::NodeId> Tape::network_forward(NodeId x_node, NodeId t_node) {
  if (t_node != x_node + 1) {
    throw std::invalid_argument("network inputs must be consecutive tape nodes (x then t)");
  }
  const bool use_tanh = params_->config.activation == Activation::Tanh;
  NodeId first = x_node;
  for (std::size_t l = 0; l < views_.size(); ++l) {
    const auto& v = views_[l];
    // affine rows allocate consecutively, as do the activations below
    NodeId lin_first = static_cast<NodeId>(nodes_.size());
    for (int i = 0; i < v.rows; ++i) affine_row(static_cast<int>(l), i, first);
    const bool output_layer = (l + 1 == views_.size());
    if (!output_layer && use_tanh) {
      NodeId act_first = static_cast<NodeId>(nodes_.size());
      for (int i = 0; i < v.rows; ++i) tanh(lin_first + i);
      first = act_first;
    } else {
      first = lin_first;
    }
  }
  std::vector<NodeId> out(views_.back().rows);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = first + static_cast<NodeId>(i);
  return out;
}

const Jet& Tape::value(NodeId id) const {
  check_id(id);
  return nodes_[id].val;
}

void Tape::reset() { nodes_.clear(); }

std::vector<double> Tape::backward(NodeId root) const {
  check_id(root);
  if (nodes_[root].val.order() != 0) {
    throw std::invalid_argument("backward() needs an order-0 scalar root");
  }

  std::vector<Jet> adj(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    adj[i] = Jet::constant(0.0, nodes_[i].val.order());
  }
  adj[root].set_coeff(0, 1.0);

  std::vector<double> grad(params_->values.size(), 0.0);

  for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
    const Node& n = nodes_[id];
    const Jet& g = adj[id];
    switch (n.op) {
      case Op::Constant:
      case Op::Input:
        break;
      case Op::Param:
        grad[n.param_index] += g.coeff(0);
        break;
      case Op::Add:
        adj[n.a] += g;
        adj[n.b] += g;
        break;
      case Op::Sub:
        adj[n.a] += g;
        adj[n.b] -= g;
        break;
      case Op::Mul:
        accumulate_adjoint_product(g, nodes_[n.b].val, &adj[n.a]);
        accumulate_adjoint_product(g, nodes_[n.a].val, &adj[n.b]);
        break;
      case Op::Scale:
        adj[n.a] += g * n.konst;
        break;
      case Op::AddConst:
        adj[n.a] += g;
        break;
      case Op::Tanh:
      case Op::Sin:
      case Op::Cos:
        accumulate_adjoint_product(g, n.aux, &adj[n.a]);
        break;
      case Op::Extract: {
        const double gbar = g.coeff(0) * kFactorial[n.k];
        adj[n.a].set_coeff(n.k, adj[n.a].coeff(n.k) + gbar);
        break;
      }
      case Op::AffineRow: {
        const auto& v = views_[static_cast<std::size_t>(n.layer)];
        const double* w = &params_->values[v.weight_offset + static_cast<std::size_t>(n.row) * v.cols];
        double* gw = &grad[v.weight_offset + static_cast<std::size_t>(n.row) * v.cols];
        const int order = g.order();
        for (int j = 0; j < v.cols; ++j) {
          const Jet& in = nodes_[n.a + j].val;
          adj[n.a + j] += g * w[j];
          double dot = 0.0;
          for (int k = 0; k <= order; ++k) dot += g.coeff(k) * in.coeff(k);
          gw[j] += dot;
        }
        grad[v.bias_offset + n.row] += g.coeff(0);
        break;
      }
    }
  }
  return grad;
}

}  // namespace apinn
