#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apinn/jet.hpp"

namespace apinn {

enum class ModelKind { Pinn, Apinn, Fdm, Sann };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

enum class Activation { Tanh, Identity };

// Input axis a jet pass is seeded along.
enum class Axis { X, T };

// Fully connected multilayer perceptron shape. The output layer is always
// linear; hidden layers use `activation` (tanh in every real configuration,
// identity exists so derivative plumbing can be tested on exact polynomials).
struct MlpConfig {
  int hidden_layers = 4;
  int width = 55;
  int outputs = 1;
  int input_dim = 2;
  Activation activation = Activation::Tanh;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

// Flattened view of one affine layer inside Params::values.
struct LayerView {
  int weight_offset = 0;  // row-major rows x cols block
  int bias_offset = 0;
  int rows = 0;
  int cols = 0;
};

std::vector<LayerView> layer_views(const MlpConfig& config);
int param_count(const MlpConfig& config);

// Trainable weights and biases, flattened as [W1|b1|...|Wout|bout] with W
// row-major. Flatten/unflatten round-trips exactly by construction.
struct Params {
  MlpConfig config;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

// Glorot-uniform weights, zero biases; bit-reproducible for a given seed.
Params init_params(const MlpConfig& config, std::uint64_t seed);

// Portable text checkpoint format: JSON {config, seed, flat_values}.
std::string params_to_json(const Params& params);
Params params_from_json(const std::string& text);

// Value-only evaluation (order-0 path, linear output layer).
std::vector<double> forward(const Params& params, double x, double t);

// Taylor-jet evaluation of every network output along one seeded input axis.
// Returns one jet per output; jet.derivative(k) is d^k output / d seed^k.
// Orders above 4 along x or above 2 along t are rejected.
std::vector<Jet> forward_jet(const Params& params, double x, double t, Axis seed, int order);

// Field value and the derivatives a beam-vibration loss consumes. Entries not
// produced by the active model kind stay disengaged.
struct DerivBundle {
  std::optional<double> u, u_t, u_tt;
  std::optional<double> u_x, u_xx, u_xxx, u_xxxx;
  std::optional<double> v, v_x, v_xx;
};

// Assembles the bundle from two jet passes: an x-seeded pass (order 4 for
// PINN, 2 for A-PINN) and a t-seeded pass (order 2).
DerivBundle derivatives(const Params& params, double x, double t, ModelKind kind);

// Anything that can present itself as a differentiable space-time field. The
// network is the real implementation; analytic test fields plug in here so
// loss assembly can be validated against closed forms.
class FieldEval {
 public:
  virtual ~FieldEval() = default;
  virtual DerivBundle derivs(double x, double t, ModelKind kind) const = 0;
};

class NetworkField final : public FieldEval {
 public:
  explicit NetworkField(const Params& params) : params_(&params) {}
  DerivBundle derivs(double x, double t, ModelKind kind) const override {
    return derivatives(*params_, x, t, kind);
  }

 private:
  const Params* params_;
};

}  // namespace apinn
