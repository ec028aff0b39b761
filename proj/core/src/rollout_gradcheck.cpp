// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/rollout_gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "arollout/error.hpp"

namespace arollout {

ObjectiveGradient objective_gradient(const Forecaster& model, std::span<const SeriesWindow> windows,
                                     const RolloutConfig& cfg, Objective objective,
                                     std::optional<GradientFault> fault) {
  Tape tape;
  if (fault) tape.inject_fault(fault->op, fault->factor);
  BoundForecaster bound = bind(model, &tape);
  Tensor loss = batch_objective(bound, windows, cfg, objective);
  Gradients grads = tape.backward(loss);
  return {loss.item(), flat_gradient(grads, bound), tape.min_kink_margin(), tape.kink_signature()};
}

double objective_value(const Forecaster& model, std::span<const double> flat_params,
                       std::span<const SeriesWindow> windows, const RolloutConfig& cfg, Objective objective) {
  Forecaster probe = model;
  probe.set_flat_parameters(flat_params);
  return batch_objective(bind(probe, nullptr), windows, cfg, objective).item();
}

NormBoundSample norm_bound_sample(const Forecaster& model, const SeriesWindow& window, const RolloutConfig& cfg) {
  Tape tape;
  BoundForecaster bound = bind(model, &tape);
  BlockErrors errors = ar_loss(bound, window, cfg);

  NormBoundSample sample;
  sample.loss_grad_norm = l2_norm(flat_gradient(tape.backward(errors.loss), bound));
  double discount = 1.0;
  double largest = 0.0;
  for (const Tensor& e : errors.e) {
    const double norm = l2_norm(flat_gradient(tape.backward(e), bound));
    sample.block_grad_norms.push_back(norm);
    sample.block_errors.push_back(e.item());
    sample.discounted_bound += discount * norm;
    largest = std::max(largest, norm);
    discount *= cfg.gamma;
  }
  sample.geometric_bound = largest / (1.0 - cfg.gamma);
  return sample;
}

bool norm_bound_holds(const NormBoundSample& sample) {
  return sample.loss_grad_norm <= sample.discounted_bound &&
         sample.loss_grad_norm < sample.geometric_bound + kNormBoundSlack;
}

GradCheckReport check_ar_gradients(const Forecaster& model, std::span<const SeriesWindow> windows,
                                   const RolloutConfig& cfg, const GradCheckOptions& options) {
  if (windows.empty()) throw InvalidInput("gradient check needs at least one window");
  GradCheckReport report;
  report.step_size = options.step;

  const ObjectiveGradient analytic = objective_gradient(model, windows, cfg, Objective::kAr, options.fault);
  const std::vector<double> params = model.flat_parameters();

  // sg(e_k) is a constant for the derivative but its forward value still
  // moves with the parameters, so the numeric side holds it at the base point.
  std::vector<std::vector<double>> anchors;
  for (const SeriesWindow& w : windows) {
    std::vector<double> a;
    for (const Tensor& e : ar_loss(bind(model, nullptr), w, cfg).e) a.push_back(e.item());
    anchors.push_back(std::move(a));
  }

  // Each probe runs on a scratch tape so that a step flipping the sign of
  // any relu/abs argument is caught instead of polluting the comparison.
  Forecaster probe = model;
  const std::vector<double> numeric = finite_diff_oracle(
      [&](std::span<const double> p) {
        probe.set_flat_parameters(p);
        Tape tape;
        const BoundForecaster bound = bind(probe, &tape);
        double total = 0.0;
        for (std::size_t i = 0; i < windows.size(); ++i) {
          const RolloutPrediction pred = rollout_predict(bound, windows[i].context, cfg);
          std::vector<Tensor> errors;
          for (std::size_t k = 0; k < cfg.steps; ++k) {
            errors.push_back(block_error(pred.blocks[k],
                                         slice(windows[i].future, 0, k * cfg.block, (k + 1) * cfg.block)));
          }
          total += discounted_objective(errors, cfg.gamma, cfg.beta, anchors[i]).item();
        }
        if (tape.kink_signature() != analytic.kink_signature) report.kink_crossed = true;
        return windows.size() == 1 ? total : total / static_cast<double>(windows.size());
      },
      params, options.step);

  std::size_t offset = 0;
  for (const Parameter& p : model.params()) {
    const std::size_t n = p.value.size();
    const double err = relative_error(std::span(analytic.grad).subspan(offset, n),
                                      std::span(numeric).subspan(offset, n));
    report.per_param_errors.emplace_back(p.name, err);
    report.max_rel_error = std::max(report.max_rel_error, err);
    offset += n;
  }

  for (const SeriesWindow& w : windows) {
    const NormBoundSample sample = norm_bound_sample(model, w, cfg);
    report.norm_bound_ok = report.norm_bound_ok && norm_bound_holds(sample);
    for (double g : sample.block_grad_norms) report.d_hat = std::max(report.d_hat, g);
    if (sample.discounted_bound > 0.0) {
      report.worst_bound_ratio = std::max(report.worst_bound_ratio, sample.loss_grad_norm / sample.discounted_bound);
    }
  }
  return report;
}

}  // namespace arollout
