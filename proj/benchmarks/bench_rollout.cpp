// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "arollout/dataset.hpp"
#include "arollout/evaluator.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/rollout_loss.hpp"
#include "arollout/trainer.hpp"

namespace arollout {
namespace {

ModelKind kind_arg(const benchmark::State& state) { return static_cast<ModelKind>(state.range(0)); }

ForecasterDims dims_for(std::size_t variates) { return {48, 0, 12, variates, 32}; }

void BM_Forecast(benchmark::State& state) {
  const Forecaster model = init_forecaster(kind_arg(state), dims_for(4), 1);
  const SeriesDataset ds = gen_sinusoid(400, 4, {24, 60}, 1.0, 0.1, 2);
  const Tensor context = ds.rows(0, 48);
  for (auto _ : state) benchmark::DoNotOptimize(forecast(model, context));
  state.SetLabel(std::string(to_string(kind_arg(state))));
}
BENCHMARK(BM_Forecast)->DenseRange(0, 2);

// One window, forward and backward, as the number of rollout steps grows.
void BM_ArLossBackward(benchmark::State& state) {
  const RolloutConfig cfg{48, 12, 0, static_cast<std::size_t>(state.range(1))};
  const Forecaster model = init_forecaster(kind_arg(state), dims_for(4), 1);
  const SeriesDataset ds = gen_sinusoid(600, 4, {24, 60}, 1.0, 0.1, 2);
  const std::vector<SeriesWindow> windows = prepare_windows(ds, Split::kTrain, cfg);
  for (auto _ : state) {
    Tape tape;
    BoundForecaster bound = bind(model, &tape);
    BlockErrors e = ar_loss(bound, windows.front(), cfg);
    benchmark::DoNotOptimize(tape.backward(e.loss));
  }
  state.SetLabel(std::string(to_string(kind_arg(state))));
}
BENCHMARK(BM_ArLossBackward)->ArgsProduct({{0, 1, 2}, {1, 4, 8}});

void BM_EvaluateRollout(benchmark::State& state) {
  const RolloutConfig cfg{48, 12, 0, static_cast<std::size_t>(state.range(0))};
  const Forecaster model = init_forecaster(ModelKind::kLinear, dims_for(1), 1);
  const SeriesDataset ds = gen_sinusoid(2000, 1, {150}, 1.0, 0.1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(model, ds, Split::kTest, cfg));
}
BENCHMARK(BM_EvaluateRollout)->Arg(4)->Arg(14);

}  // namespace
}  // namespace arollout

BENCHMARK_MAIN();
