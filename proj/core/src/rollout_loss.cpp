// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/rollout_loss.hpp"

#include <cmath>
#include <string>

#include "arollout/error.hpp"

namespace arollout {

void RolloutConfig::validate() const {
  if (context < 1) throw InvalidInput("rollout.context must be >= 1");
  if (block < 1) throw InvalidInput("rollout.block must be >= 1");
  if (steps < 1) throw InvalidInput("rollout.steps must be >= 1");
  if (overlap >= context) throw InvalidInput("rollout.overlap must be < context length");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidInput("rollout.gamma must lie in (0, 1), got " + std::to_string(gamma));
  }
  if (!(beta > 0.0 && beta < 0.5)) {
    throw InvalidInput("rollout.beta must lie in (0, 0.5), got " + std::to_string(beta));
  }
}

namespace {

void require_compatible(const Forecaster& model, const RolloutConfig& cfg) {
  const ForecasterDims& d = model.dims();
  if (d.context != cfg.context || d.block != cfg.block || d.overlap != cfg.overlap) {
    throw InvalidInput("rollout config (S=" + std::to_string(cfg.context) + ", T=" + std::to_string(cfg.block) +
                       ", L=" + std::to_string(cfg.overlap) + ") does not match model dims (S=" +
                       std::to_string(d.context) + ", T=" + std::to_string(d.block) +
                       ", L=" + std::to_string(d.overlap) + ")");
  }
}

}  // namespace

RolloutPrediction rollout_predict(const BoundForecaster& model, const Tensor& context, const RolloutConfig& cfg) {
  cfg.validate();
  require_compatible(*model.model, cfg);
  const std::size_t s = cfg.context, t = cfg.block, l = cfg.overlap;
  if (context.rank() != 2 || context.rows() != s) {
    throw InvalidInput("rollout_predict: context must have " + std::to_string(s) + " rows");
  }

  RolloutPrediction out;
  out.blocks.reserve(cfg.steps);

  Tensor first = forecast(model, context);
  out.blocks.push_back(slice(first, 0, l, l + t));

  // padded holds rows 0 .. S + kT - 1 of the ground-truth-then-predicted
  // sequence; step k reads rows kT .. S + kT - 1.
  std::vector<Tensor> padded{context, out.blocks.back()};
  for (std::size_t k = 1; k < cfg.steps; ++k) {
    Tensor sequence = concat(padded, 0);
    Tensor input = slice(sequence, 0, k * t, k * t + s);
    Tensor next = forecast(model, input);
    out.blocks.push_back(slice(next, 0, l, l + t));
    padded.push_back(out.blocks.back());
  }

  std::vector<Tensor> parts;
  parts.reserve(cfg.steps + 1);
  if (l > 0) parts.push_back(slice(first, 0, 0, l));
  parts.insert(parts.end(), out.blocks.begin(), out.blocks.end());
  out.values = parts.size() == 1 ? parts.front() : concat(parts, 0);
  return out;
}

RolloutPrediction rollout_predict(const Forecaster& model, const Tensor& context, const RolloutConfig& cfg) {
  return rollout_predict(bind(model, nullptr), context, cfg);
}

Tensor block_error(const Tensor& pred_block, const Tensor& truth_block) {
  if (pred_block.shape() != truth_block.shape()) throw InvalidInput("block_error: prediction and truth shapes differ");
  Tensor diff = sub(pred_block, truth_block);
  return mean(mul(diff, diff));
}

namespace {

// Accumulates the discounted objective; anchor(k) supplies the constant
// compared against e_{k+1}.
template <typename Anchor>
Tensor accumulate(std::span<const Tensor> errors, double gamma, double beta, Anchor&& anchor) {
  if (errors.empty()) throw InvalidInput("discounted_objective: no block errors");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("discounted_objective: gamma must lie in (0, 1)");
  if (!(beta >= 0.0 && beta < 0.5)) throw InvalidInput("discounted_objective: beta must lie in [0, 0.5)");
  Tensor loss = errors[0];
  double discount = 1.0;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    discount *= gamma;
    const Tensor& current = errors[k];
    Tensor penalty = abs(sub(current, anchor(k - 1)));
    Tensor term = add(scale(current, 1.0 - beta), scale(penalty, beta));
    loss = add(loss, scale(term, discount));
  }
  return loss;
}

}  // namespace

Tensor discounted_objective(std::span<const Tensor> errors, double gamma, double beta) {
  return accumulate(errors, gamma, beta, [&](std::size_t k) { return stop_gradient(errors[k]); });
}

Tensor discounted_objective(std::span<const Tensor> errors, double gamma, double beta,
                            std::span<const double> anchors) {
  if (anchors.size() != errors.size()) throw InvalidInput("discounted_objective: one anchor per block error required");
  return accumulate(errors, gamma, beta, [&](std::size_t k) { return Tensor::scalar(anchors[k]); });
}

std::size_t count_violations(std::span<const double> errors) {
  std::size_t n = 0;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] < errors[k - 1]) ++n;
  }
  return n;
}

BlockErrors ar_loss(const BoundForecaster& model, const SeriesWindow& window, const RolloutConfig& cfg) {
  cfg.validate();
  if (window.future.rank() != 2 || window.future.rows() < cfg.horizon()) {
    throw InvalidInput("ar_loss: window provides " + std::to_string(window.future.rows()) +
                       " future rows, rollout needs " + std::to_string(cfg.horizon()));
  }
  RolloutPrediction pred = rollout_predict(model, window.context, cfg);

  BlockErrors out;
  out.e.reserve(cfg.steps);
  std::vector<double> detached;
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    Tensor truth = slice(window.future, 0, k * cfg.block, (k + 1) * cfg.block);
    out.e.push_back(block_error(pred.blocks[k], truth));
    detached.push_back(out.e.back().item());
  }
  out.loss = discounted_objective(out.e, cfg.gamma, cfg.beta);
  out.violations = count_violations(detached);
  return out;
}

Tensor first_block_mse(const BoundForecaster& model, const SeriesWindow& window, const RolloutConfig& cfg) {
  cfg.validate();
  require_compatible(*model.model, cfg);
  if (window.future.rank() != 2 || window.future.rows() < cfg.block) {
    throw InvalidInput("first_block_mse: window provides " + std::to_string(window.future.rows()) +
                       " future rows, one block needs " + std::to_string(cfg.block));
  }
  Tensor pred = slice(forecast(model, window.context), 0, cfg.overlap, cfg.overlap + cfg.block);
  return block_error(pred, slice(window.future, 0, 0, cfg.block));
}

std::string_view to_string(Objective objective) { return objective == Objective::kAr ? "ar" : "mse"; }

Objective parse_objective(std::string_view name) {
  if (name == "ar") return Objective::kAr;
  if (name == "mse") return Objective::kMse;
  throw InvalidInput("unknown objective '" + std::string(name) + "' (expected ar or mse)");
}

Tensor batch_objective(const BoundForecaster& model, std::span<const SeriesWindow> windows,
                       const RolloutConfig& cfg, Objective objective) {
  if (windows.empty()) throw InvalidInput("batch_objective: empty batch");
  Tensor total;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    Tensor loss = objective == Objective::kAr ? ar_loss(model, windows[i], cfg).loss
                                              : first_block_mse(model, windows[i], cfg);
    total = i == 0 ? loss : add(total, loss);
  }
  return windows.size() == 1 ? total : scale(total, 1.0 / static_cast<double>(windows.size()));
}

std::vector<double> flat_gradient(const Gradients& grads, const BoundForecaster& model) {
  std::vector<double> flat;
  for (const Tensor& p : model.params) {
    Tensor g = grads.of(p);
    flat.insert(flat.end(), g.values().begin(), g.values().end());
  }
  return flat;
}

double loss_magnitude_factor(const RolloutConfig& cfg) {
  cfg.validate();
  return (1.0 - std::pow(cfg.gamma, static_cast<double>(cfg.steps))) / (1.0 - cfg.gamma);
}

}  // namespace arollout
