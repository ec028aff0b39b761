// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/adam.hpp"

#include <cmath>

#include "arollout/error.hpp"

namespace arollout {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::uint64_t t,
               const AdamConfig& cfg) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InvalidInput("adam_step: params, grads and optimizer state must have the same length");
  }
  if (t < 1) throw InvalidInput("adam_step: step index must be >= 1");
  const double m_corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double v_corr = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / m_corr;
    const double v_hat = state.v[i] / v_corr;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace arollout
