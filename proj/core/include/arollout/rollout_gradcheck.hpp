// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end verification of the rollout objective's gradients against the
// central-difference oracle, plus the per-window norm bound
//   ||grad loss|| <= sum_k gamma^(k-1) ||grad e_k|| < max_k ||grad e_k|| / (1 - gamma).

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "arollout/forecaster.hpp"
#include "arollout/gradcheck.hpp"
#include "arollout/rollout_loss.hpp"

namespace arollout {

struct GradientFault {
  OpKind op = OpKind::kMatMul;
  double factor = 1.01;
};

struct ObjectiveGradient {
  double value = 0.0;
  std::vector<double> grad;  // flat, Forecaster::flat_parameters() order
  double kink_margin = 0.0;  // smallest |arg| of any relu/abs on the tape
  std::uint64_t kink_signature = 0;
};

ObjectiveGradient objective_gradient(const Forecaster& model, std::span<const SeriesWindow> windows,
                                     const RolloutConfig& cfg, Objective objective = Objective::kAr,
                                     std::optional<GradientFault> fault = std::nullopt);

// Untaped evaluation of the same objective at `flat_params`.
double objective_value(const Forecaster& model, std::span<const double> flat_params,
                       std::span<const SeriesWindow> windows, const RolloutConfig& cfg,
                       Objective objective = Objective::kAr);

struct NormBoundSample {
  double loss_grad_norm = 0.0;
  std::vector<double> block_grad_norms;  // ||grad e_k||, k = 1..n
  double discounted_bound = 0.0;         // sum_k gamma^(k-1) ||grad e_k||
  double geometric_bound = 0.0;          // max_k ||grad e_k|| / (1 - gamma)
  std::vector<double> block_errors;
};

NormBoundSample norm_bound_sample(const Forecaster& model, const SeriesWindow& window, const RolloutConfig& cfg);

// Additive slack on the geometric comparison only.
inline constexpr double kNormBoundSlack = 1e-9;

// loss_grad_norm <= discounted_bound (exact) and
// loss_grad_norm < geometric_bound + kNormBoundSlack.
bool norm_bound_holds(const NormBoundSample& sample);

struct GradCheckOptions {
  double step = 1e-4;
  std::optional<GradientFault> fault;
};

GradCheckReport check_ar_gradients(const Forecaster& model, std::span<const SeriesWindow> windows,
                                   const RolloutConfig& cfg, const GradCheckOptions& options = {});

}  // namespace arollout
