// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arollout/adam.hpp"
#include "arollout/checkpoint.hpp"
#include "arollout/dataset.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/rollout_loss.hpp"

namespace arollout {

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  Objective objective = Objective::kAr;

  // Throws InvalidInput naming the offending field.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  double initial_val_loss = 0.0;  // objective on val windows before any update
  std::vector<std::string> warnings;
};

// Normalized (context, future) windows of extent S + n*T from one split.
std::vector<SeriesWindow> prepare_windows(const SeriesDataset& ds, Split split, const RolloutConfig& cfg);

// Mini-batch Adam over the chosen objective. Batches are drawn from a seeded
// shuffle; after every epoch the objective is measured on the val split and
// training stops once `patience` epochs pass without improvement. Returns
// the parameters with the lowest recorded val loss. Throws InvalidInput when
// the train split holds no window.
TrainResult train(const Forecaster& model, const SeriesDataset& ds, const RolloutConfig& rollout,
                  const TrainConfig& cfg);

// "epoch,train_loss,val_loss" with 17 significant digits.
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace arollout
