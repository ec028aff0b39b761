// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Small forecasters mapping an S x V context to an (L + T) x V forecast.
//
//   linear              channel-independent  W x + b
//   mlp                 channel-independent  W2 relu(W1 x + b1) + b2
//   inverted_attention  one block over variate tokens: embed each variate's
//                       history, single-head self-attention across variates,
//                       residual + layer norm, feed-forward, residual + layer
//                       norm, project every token to L + T steps.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arollout/tensor.hpp"

namespace arollout {

enum class ModelKind { kLinear, kMlp, kInvertedAttention };

std::string_view to_string(ModelKind kind);
// Accepts "linear", "mlp", "inverted_attention". Throws InvalidInput.
ModelKind parse_model_kind(std::string_view name);

struct ForecasterDims {
  std::size_t context = 1;   // S
  std::size_t overlap = 0;   // L
  std::size_t block = 1;     // T
  std::size_t variates = 1;  // V
  std::size_t hidden = 0;    // unused by linear

  std::size_t output_rows() const { return overlap + block; }
  friend bool operator==(const ForecasterDims&, const ForecasterDims&) = default;
};

struct Parameter {
  std::string name;
  Tensor value;
};

class Forecaster {
 public:
  Forecaster(ModelKind kind, ForecasterDims dims, std::vector<Parameter> params);

  ModelKind kind() const { return kind_; }
  const ForecasterDims& dims() const { return dims_; }
  const std::vector<Parameter>& params() const { return params_; }

  std::size_t parameter_count() const;
  // Concatenation of every parameter tensor, in declaration order.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> flat);

 private:
  ModelKind kind_;
  ForecasterDims dims_;
  std::vector<Parameter> params_;
};

// Throws InvalidInput when S, T, V < 1 or hidden < 1 for mlp/attention.
void validate_dims(ModelKind kind, const ForecasterDims& dims);

// Number of scalars in a model of this kind and size.
std::size_t parameter_count(ModelKind kind, const ForecasterDims& dims);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); same seed => same bits.
Forecaster init_forecaster(ModelKind kind, const ForecasterDims& dims, std::uint64_t seed);

// A model whose parameters have been registered as leaves on a tape (or kept
// as constants when `tape` is null).
struct BoundForecaster {
  const Forecaster* model = nullptr;
  std::vector<Tensor> params;
};

BoundForecaster bind(const Forecaster& model, Tape* tape);

Tensor forecast(const BoundForecaster& model, const Tensor& context);
// Untaped inference.
Tensor forecast(const Forecaster& model, const Tensor& context);

}  // namespace arollout
