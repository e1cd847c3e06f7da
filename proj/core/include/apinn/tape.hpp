#pragma once

#include <cstdint>
#include <vector>

#include "apinn/jet.hpp"
#include "apinn/network.hpp"

namespace apinn {

// Reverse-mode accumulation over jet-valued expressions.
//
// The tape records a topologically ordered list of primitive operations (add,
// mul, scale, tanh, sin/cos, affine rows, coefficient extraction) whose values
// are Jets. backward(root) returns the dense gradient of a scalar root with
// respect to every entry of the bound Params, including paths that run
// through jet coefficients, so losses built from u_tt, u_xxxx or v_xx are
// differentiable in the weights.
//
// The tape is rebuilt per loss evaluation; reset() keeps the node storage.
class Tape {
 public:
  using NodeId = std::int32_t;

  explicit Tape(const Params& params);

  const Params& params() const { return *params_; }

  NodeId constant(const Jet& value);
  NodeId constant(double value, int order = 0);
  // Order-0 node tracking params.values[index].
  NodeId param(int index);
  // Seeded variable (coeff 1 along its own direction).
  NodeId input(double value, int order);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  NodeId add_const(NodeId a, double c);
  NodeId tanh(NodeId a);
  NodeId sin(NodeId a);
  NodeId cos(NodeId a);
  // k-th seeded-input derivative of `a` as a fresh order-0 scalar node.
  NodeId extract(NodeId a, int k);

  // One affine row of the bound network: out = W[layer](row,:) . inputs + b.
  // The inputs must be `cols` consecutively allocated nodes starting at
  // `first_input` (layer outputs always are).
  NodeId affine_row(int layer, int row, NodeId first_input);

  // Whole network forward pass over jet inputs already on the tape.
  // Returns one node per network output.
  std::vector<NodeId> network_forward(NodeId x_node, NodeId t_node);

  const Jet& value(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }
  void reset();

  // Gradient of the order-0 scalar `root` w.r.t. every parameter.
  std::vector<double> backward(NodeId root) const;

 private:
  enum class Op : std::uint8_t {
    Constant, Param, Input, Add, Sub, Mul, Scale, AddConst, Tanh, Sin, Cos, Extract, AffineRow,
  };

  struct Node {
    Jet val;
    Jet aux;  // reverse-mode cofactor for tanh/sin/cos
    Op op = Op::Constant;
    NodeId a = -1;
    NodeId b = -1;
    double konst = 0.0;  // scale factor / added constant
    std::int32_t k = 0;  // extract order
    std::int32_t layer = -1;
    std::int32_t row = -1;
    std::int32_t param_index = -1;
  };

  NodeId push(Node node);
  void check_id(NodeId id) const;

  const Params* params_;
  std::vector<LayerView> views_;
  std::vector<Node> nodes_;
};

}  // namespace apinn
