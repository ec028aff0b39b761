// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/trainer.hpp"

#include <cstdio>
#include <numeric>

#include "arollout/error.hpp"
#include "arollout/normalization.hpp"
#include "arollout/random.hpp"

namespace arollout {

void TrainConfig::validate() const {
  if (!(adam.lr > 0.0)) throw InvalidInput("train.lr must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw InvalidInput("train.adam_beta1 must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw InvalidInput("train.adam_beta2 must lie in [0, 1)");
  if (!(adam.eps > 0.0)) throw InvalidInput("train.adam_eps must be > 0");
  if (batch_size < 1) throw InvalidInput("train.batch_size must be >= 1");
  if (patience < 1) throw InvalidInput("train.patience must be >= 1");
}

std::vector<SeriesWindow> prepare_windows(const SeriesDataset& ds, Split split, const RolloutConfig& cfg) {
  WindowSet set = window_iter(ds, split, cfg.context, cfg.horizon());
  std::vector<SeriesWindow> out;
  out.reserve(set.windows.size());
  for (const SeriesWindow& w : set.windows) out.push_back(normalize_window(w).window);
  return out;
}

namespace {

double mean_objective(const Forecaster& model, const std::vector<SeriesWindow>& windows, const RolloutConfig& cfg,
                      Objective objective) {
  return batch_objective(bind(model, nullptr), windows, cfg, objective).item();
}

}  // namespace

TrainResult train(const Forecaster& model, const SeriesDataset& ds, const RolloutConfig& rollout,
                  const TrainConfig& cfg) {
  rollout.validate();
  cfg.validate();
  const std::vector<SeriesWindow> train_windows = prepare_windows(ds, Split::kTrain, rollout);
  if (train_windows.empty()) {
    throw InvalidInput("train split has no window of extent S + n*T = " +
                       std::to_string(rollout.context + rollout.horizon()));
  }
  std::vector<SeriesWindow> val_windows = prepare_windows(ds, Split::kVal, rollout);

  TrainResult result{Checkpoint{model, rollout, cfg.objective}, {}, 0.0, {}};
  result.best.seed = cfg.seed;
  if (val_windows.empty()) {
    result.warnings.push_back("val split holds no window; early stopping uses the train objective");
  }
  const std::vector<SeriesWindow>& monitor = val_windows.empty() ? train_windows : val_windows;

  Forecaster current = model;
  result.initial_val_loss = mean_objective(current, monitor, rollout, cfg.objective);
  result.best.val_loss = result.initial_val_loss;

  std::vector<double> params = current.flat_parameters();
  AdamState state(params.size());
  std::uint64_t step = 0;
  Xoshiro256 rng(derive_seed(cfg.seed, 0x5eed));
  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_val = 0.0;
  std::size_t since_best = 0;
  std::vector<SeriesWindow> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double train_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_windows[order[i]]);

      Tape tape;
      BoundForecaster bound = bind(current, &tape);
      Tensor loss = batch_objective(bound, batch, rollout, cfg.objective);
      const std::vector<double> grad = flat_gradient(tape.backward(loss), bound);
      adam_step(params, grad, state, ++step, cfg.adam);
      current.set_flat_parameters(params);
      train_sum += loss.item() * static_cast<double>(batch.size());
    }

    const double val = mean_objective(current, monitor, rollout, cfg.objective);
    result.history.push_back({epoch, train_sum / static_cast<double>(order.size()), val});
    if (epoch == 1 || val < best_val) {
      best_val = val;
      since_best = 0;
      result.best.model = current;
      result.best.epoch = epoch;
      result.best.val_loss = val;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_loss\n";
  char line[96];
  for (const EpochRecord& r : history) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", r.epoch, r.train_loss, r.val_loss);
    out += line;
  }
  return out;
}

}  // namespace arollout
