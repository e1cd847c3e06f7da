#include <benchmark/benchmark.h>

#include "apinn/jet.hpp"
#include "apinn/network.hpp"

using apinn::Jet;

static void JetMul(benchmark::State& state) {
  const Jet a = Jet::variable(0.37, static_cast<int>(state.range(0)));
  Jet b = tanh(a);
  for (auto _ : state) {
    Jet c = a * b;
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(JetMul)->Arg(2)->Arg(4);

static void JetTanh(benchmark::State& state) {
  const Jet a = Jet::variable(0.37, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Jet y = tanh(a);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(JetTanh)->Arg(2)->Arg(4);

static void NetworkForwardJet(benchmark::State& state) {
  apinn::MlpConfig config{4, 55, 2};
  const apinn::Params params = apinn::init_params(config, 0);
  for (auto _ : state) {
    auto jets = apinn::forward_jet(params, 0.4, 0.6, apinn::Axis::X, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(jets);
  }
}
BENCHMARK(NetworkForwardJet)->Arg(2)->Arg(4);
