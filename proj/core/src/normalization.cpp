// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "arollout/error.hpp"

namespace arollout {

namespace {

void require_columns(const Tensor& x, const NormState& state) {
  if (x.rank() != 2 || x.cols() != state.mean.size()) {
    throw InvalidInput("normalization: tensor has " + std::to_string(x.cols()) + " columns, state has " +
                       std::to_string(state.mean.size()));
  }
}

}  // namespace

NormState compute_norm(const Tensor& context) {
  if (context.rank() != 2) throw InvalidInput("compute_norm: context must be rank 2");
  const std::size_t rows = context.rows(), cols = context.cols();
  NormState state{std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)};
  for (std::size_t c = 0; c < cols; ++c) {
    double mu = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mu += context.at(r, c);
    mu /= static_cast<double>(rows);
    double var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = context.at(r, c) - mu;
      var += d * d;
    }
    var /= static_cast<double>(rows);
    state.mean[c] = mu;
    state.std[c] = std::max(std::sqrt(var), kStdFloor);
  }
  return state;
}

Tensor apply_norm(const Tensor& x, const NormState& state) {
  require_columns(x, state);
  std::vector<double> v(x.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) v[r * x.cols() + c] = (x.at(r, c) - state.mean[c]) / state.std[c];
  }
  return Tensor(x.shape(), std::move(v));
}

Tensor invert_norm(const Tensor& x, const NormState& state) {
  require_columns(x, state);
  std::vector<double> v(x.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) v[r * x.cols() + c] = x.at(r, c) * state.std[c] + state.mean[c];
  }
  return Tensor(x.shape(), std::move(v));
}

NormalizedWindow normalize_window(const SeriesWindow& raw) {
  NormState state = compute_norm(raw.context);
  SeriesWindow w{apply_norm(raw.context, state), apply_norm(raw.future, state), raw.origin_index};
  return {std::move(w), std::move(state)};
}

}  // namespace arollout
