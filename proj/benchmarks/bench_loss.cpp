#include <vector>

#include <benchmark/benchmark.h>

#include "apinn/loss.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"

using namespace apinn;

// One full-batch loss + gradient evaluation at the published problem scales:
// the cost of a training epoch.

static void EpochP1Apinn(benchmark::State& state) {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {500, 200, 200, 500}, 0,
                                         SampleStrategy::UniformRandom);
  MlpConfig config{4, 55, 2};
  const Params params = init_params(config, 0);
  BeamLossObjective obj(prob, colloc, ModelKind::Apinn, config);
  std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
  const LossWeights w;
  for (auto _ : state) {
    const double f = obj.eval(params.values, w, grad);
    benchmark::DoNotOptimize(f);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(EpochP1Apinn)->Unit(benchmark::kMillisecond);

static void EpochP1Pinn(benchmark::State& state) {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {500, 200, 200, 500}, 0,
                                         SampleStrategy::UniformRandom);
  MlpConfig config{4, 55, 1};
  const Params params = init_params(config, 0);
  BeamLossObjective obj(prob, colloc, ModelKind::Pinn, config);
  std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
  const LossWeights w;
  for (auto _ : state) {
    const double f = obj.eval(params.values, w, grad);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(EpochP1Pinn)->Unit(benchmark::kMillisecond);

static void EpochP3Apinn(benchmark::State& state) {
  const ProblemSpec prob = p3();
  const auto colloc = sample_collocation(prob, {1000, 500, 500, 500}, 0,
                                         SampleStrategy::UniformRandom);
  MlpConfig config{4, 55, 2};
  const Params params = init_params(config, 0);
  BeamLossObjective obj(prob, colloc, ModelKind::Apinn, config);
  std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
  const LossWeights w;
  for (auto _ : state) {
    const double f = obj.eval(params.values, w, grad);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(EpochP3Apinn)->Unit(benchmark::kMillisecond);
