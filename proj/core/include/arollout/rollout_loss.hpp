// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Autoregressive rollout objective.
//
// Block 1 is forecast from the ground-truth context. Block k+1 is forecast
// from the last S entries of the padded sequence (context followed by blocks
// 1..k), so from step ceil(S/T) on the model sees only its own predictions.
// Predictions re-enter the model on the tape; gradients flow through the
// whole chain.
//
// With block errors e_1..e_n (MSE per block) the objective is
//
//   loss = e_1 + sum_{k=1}^{n-1} gamma^k ((1 - beta) e_{k+1}
//                                        + beta |e_{k+1} - sg(e_k)|)
//
// sg() blocks the previous error, so the coefficient on grad e_{k+1} is
// gamma^k when e_{k+1} > e_k, gamma^k (1 - beta) on a tie and
// gamma^k (1 - 2 beta) when the error shrinks (a monotonicity violation).

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "arollout/dataset.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/tensor.hpp"

namespace arollout {

inline constexpr double kDefaultGamma = 0.5;
inline constexpr double kDefaultBeta = 0.1;

struct RolloutConfig {
  std::size_t context = 1;  // S
  std::size_t block = 1;    // T
  std::size_t overlap = 0;  // L
  std::size_t steps = 1;    // n
  double gamma = kDefaultGamma;
  double beta = kDefaultBeta;

  std::size_t horizon() const { return steps * block; }
  // Throws InvalidInput naming the offending field.
  void validate() const;
};

struct RolloutPrediction {
  Tensor values;               // (L + nT) x V, rows S-L .. S+nT-1
  std::vector<Tensor> blocks;  // n tensors of T x V
};

// No ground-truth future is consumed.
RolloutPrediction rollout_predict(const BoundForecaster& model, const Tensor& context, const RolloutConfig& cfg);
RolloutPrediction rollout_predict(const Forecaster& model, const Tensor& context, const RolloutConfig& cfg);

// Mean squared difference over all T x V entries.
Tensor block_error(const Tensor& pred_block, const Tensor& truth_block);

struct BlockErrors {
  std::vector<Tensor> e;  // e_1..e_n, still on the tape when the model is
  Tensor loss;
  std::size_t violations = 0;  // #k with e_{k+1} < e_k
};

// Discounted objective over already-computed block errors. `beta` may be 0
// here (plain discounted MSE); RolloutConfig itself requires beta > 0.
Tensor discounted_objective(std::span<const Tensor> errors, double gamma, double beta);
// Same, with anchors[k] standing in for sg(e_{k+1}) (anchors.size() ==
// errors.size()). Freezing the anchors at a base point gives the function
// whose ordinary derivative equals the stop-gradient gradient there.
Tensor discounted_objective(std::span<const Tensor> errors, double gamma, double beta,
                            std::span<const double> anchors);

// Rollout + block errors + discounted objective for one window. `window`
// must hold at least n*T future rows; values are used as given (callers
// normalize beforehand).
BlockErrors ar_loss(const BoundForecaster& model, const SeriesWindow& window, const RolloutConfig& cfg);

// Vanilla baseline: MSE of the first block only.
Tensor first_block_mse(const BoundForecaster& model, const SeriesWindow& window, const RolloutConfig& cfg);

enum class Objective { kAr, kMse };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

// Mean over windows of ar_loss (kAr) or first_block_mse (kMse), accumulated
// in window order on one tape.
Tensor batch_objective(const BoundForecaster& model, std::span<const SeriesWindow> windows,
                       const RolloutConfig& cfg, Objective objective);

// Flattened d loss / d params in Forecaster::flat_parameters() order.
std::vector<double> flat_gradient(const Gradients& grads, const BoundForecaster& model);

// (1 - gamma^n) / (1 - gamma).
double loss_magnitude_factor(const RolloutConfig& cfg);

std::size_t count_violations(std::span<const double> errors);

}  // namespace arollout
