#include "apinn/network.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "apinn/rng.hpp"

namespace apinn {

namespace {

using nlohmann::json;

constexpr std::uint64_t kInitStreamBase = 1000;

void check_config(const MlpConfig& c) {
  if (c.hidden_layers < 1 || c.width < 1) {
    throw std::invalid_argument("MlpConfig needs hidden_layers >= 1 and width >= 1");
  }
  if (c.outputs < 1 || c.input_dim < 1) {
    throw std::invalid_argument("MlpConfig needs outputs >= 1 and input_dim >= 1");
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Pinn: return "pinn";
    case ModelKind::Apinn: return "apinn";
    case ModelKind::Fdm: return "fdm";
    case ModelKind::Sann: return "sann";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "pinn") return ModelKind::Pinn;
  if (s == "apinn") return ModelKind::Apinn;
  if (s == "fdm") return ModelKind::Fdm;
  if (s == "sann") return ModelKind::Sann;
  throw std::invalid_argument("unknown model kind: " + s);
}

std::vector<LayerView> layer_views(const MlpConfig& config) {
  check_config(config);
  std::vector<LayerView> views;
  views.reserve(config.hidden_layers + 1);
  int offset = 0;
  int fan_in = config.input_dim;
  for (int l = 0; l < config.hidden_layers + 1; ++l) {
    const bool output_layer = (l == config.hidden_layers);
    const int fan_out = output_layer ? config.outputs : config.width;
    LayerView v;
    v.rows = fan_out;
    v.cols = fan_in;
    v.weight_offset = offset;
    v.bias_offset = offset + fan_out * fan_in;
    offset = v.bias_offset + fan_out;
    views.push_back(v);
    fan_in = fan_out;
  }
  return views;
}

int param_count(const MlpConfig& config) {
  const auto views = layer_views(config);
  const auto& last = views.back();
  return last.bias_offset + last.rows;
}

Params init_params(const MlpConfig& config, std::uint64_t seed) {
  Params p;
  p.config = config;
  p.seed = seed;
  p.values.assign(param_count(config), 0.0);
  const auto views = layer_views(config);
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(v.rows + v.cols));
    for (int i = 0; i < v.rows * v.cols; ++i) {
      p.values[v.weight_offset + i] =
          rng_uniform(seed, kInitStreamBase + l, static_cast<std::uint64_t>(i), -limit, limit);
    }
    // biases stay zero
  }
  return p;
}

std::string params_to_json(const Params& params) {
  json j;
  j["config"] = {
      {"hidden_layers", params.config.hidden_layers},
      {"width", params.config.width},
      {"outputs", params.config.outputs},
      {"input_dim", params.config.input_dim},
      {"activation", params.config.activation == Activation::Tanh ? "tanh" : "identity"},
  };
  j["seed"] = params.seed;
  j["flat_values"] = params.values;
  return j.dump(2);
}

Params params_from_json(const std::string& text) {
  const json j = json::parse(text);
  Params p;
  const auto& c = j.at("config");
  p.config.hidden_layers = c.at("hidden_layers").get<int>();
  p.config.width = c.at("width").get<int>();
  p.config.outputs = c.at("outputs").get<int>();
  p.config.input_dim = c.at("input_dim").get<int>();
  const auto act = c.at("activation").get<std::string>();
  if (act == "tanh") {
    p.config.activation = Activation::Tanh;
  } else if (act == "identity") {
    p.config.activation = Activation::Identity;
  } else {
    throw std::invalid_argument("unknown activation: " + act);
  }
  p.seed = j.at("seed").get<std::uint64_t>();
  p.values = j.at("flat_values").get<std::vector<double>>();
  if (static_cast<int>(p.values.size()) != param_count(p.config)) {
    throw std::invalid_argument("flat_values length does not match config shape");
  }
  return p;
}

std::vector<double> forward(const Params& params, double x, double t) {
  const auto views = layer_views(params.config);
  std::vector<double> cur = {x, t};
  std::vector<double> next;
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    next.assign(v.rows, 0.0);
    for (int i = 0; i < v.rows; ++i) {
      double acc = params.values[v.bias_offset + i];
      const double* w = &params.values[v.weight_offset + i * v.cols];
      for (int j = 0; j < v.cols; ++j) acc += w[j] * cur[j];
      next[i] = acc;
    }
    const bool output_layer = (l + 1 == views.size());
    if (!output_layer && params.config.activation == Activation::Tanh) {
      for (double& z : next) z = std::tanh(z);
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<Jet> forward_jet(const Params& params, double x, double t, Axis seed, int order) {
  const int max_order = (seed == Axis::X) ? 4 : 2;
  if (order < 0 || order > max_order) {
    throw std::invalid_argument("forward_jet order out of range for this axis");
  }
  const auto views = layer_views(params.config);
  std::vector<Jet> cur(2);
  if (order == 0) {
    cur[0] = Jet::constant(x, 0);
    cur[1] = Jet::constant(t, 0);
  } else {
    cur[0] = (seed == Axis::X) ? Jet::variable(x, order) : Jet::constant(x, order);
    cur[1] = (seed == Axis::T) ? Jet::variable(t, order) : Jet::constant(t, order);
  }
  std::vector<Jet> next;
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    next.assign(v.rows, Jet());
    for (int i = 0; i < v.rows; ++i) {
      Jet acc = Jet::constant(params.values[v.bias_offset + i], order);
      const double* w = &params.values[v.weight_offset + i * v.cols];
      for (int j = 0; j < v.cols; ++j) acc += w[j] * cur[j];
      next[i] = acc;
    }
    const bool output_layer = (l + 1 == views.size());
    if (!output_layer && params.config.activation == Activation::Tanh) {
      for (Jet& z : next) z = tanh(z);
    }
    cur.swap(next);
  }
  return cur;
}

DerivBundle derivatives(const Params& params, double x, double t, ModelKind kind) {
  if (kind != ModelKind::Pinn && kind != ModelKind::Apinn) {
    throw std::invalid_argument("derivatives() expects a PINN or A-PINN model kind");
  }
  const bool aux = (kind == ModelKind::Apinn);
  if (aux && params.config.outputs < 2) {
    throw std::invalid_argument("A-PINN derivatives need a 2-output network");
  }

  const int x_order = aux ? 2 : 4;
  const auto jx = forward_jet(params, x, t, Axis::X, x_order);
  const auto jt = forward_jet(params, x, t, Axis::T, 2);

  DerivBundle b;
  b.u = jx[0].derivative(0);
  b.u_t = jt[0].derivative(1);
  b.u_tt = jt[0].derivative(2);
  b.u_xx = jx[0].derivative(2);
  if (aux) {
    b.v = jx[1].derivative(0);
    b.v_xx = jx[1].derivative(2);
  } else {
    b.u_x = jx[0].derivative(1);
    b.u_xxx = jx[0].derivative(3);
    b.u_xxxx = jx[0].derivative(4);
  }
  return b;
}

}  // namespace apinn
