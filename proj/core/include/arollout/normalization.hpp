// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "arollout/dataset.hpp"
#include "arollout/tensor.hpp"

namespace arollout {

inline constexpr double kStdFloor = 1e-5;

// Per-variate z-score statistics of one context window.
struct NormState {
  std::vector<double> mean;
  std::vector<double> std;  // population std, floored at kStdFloor
};

NormState compute_norm(const Tensor& context);

// Column-wise (x - mean) / std. Operates on values; the result is untaped.
Tensor apply_norm(const Tensor& x, const NormState& state);
// Column-wise x * std + mean.
Tensor invert_norm(const Tensor& x, const NormState& state);

struct NormalizedWindow {
  SeriesWindow window;  // context and future in the context's z-space
  NormState state;
};

// Normalizes context and future with statistics of the context alone.
NormalizedWindow normalize_window(const SeriesWindow& raw);

}  // namespace arollout
