// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/forecaster.hpp"

#include <cmath>
#include <string>

#include "arollout/error.hpp"
#include "arollout/random.hpp"

namespace arollout {

namespace {

struct ParamSpec {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::size_t fan_in;
};

std::vector<ParamSpec> layout(ModelKind kind, const ForecasterDims& d) {
  const std::size_t out = d.output_rows();
  switch (kind) {
    case ModelKind::kLinear:
      return {{"weight", out, d.context, d.context}, {"bias", out, 1, d.context}};
    case ModelKind::kMlp:
      return {{"w1", d.hidden, d.context, d.context},
              {"b1", d.hidden, 1, d.context},
              {"w2", out, d.hidden, d.hidden},
              {"b2", out, 1, d.hidden}};
    case ModelKind::kInvertedAttention:
      // Token-major: activations are V x hidden, weights multiply on the right.
      return {{"embed_w", d.context, d.hidden, d.context},
              {"embed_b", 1, d.hidden, d.context},
              {"query_w", d.hidden, d.hidden, d.hidden},
              {"key_w", d.hidden, d.hidden, d.hidden},
              {"value_w", d.hidden, d.hidden, d.hidden},
              {"ffn_w1", d.hidden, d.hidden, d.hidden},
              {"ffn_b1", 1, d.hidden, d.hidden},
              {"ffn_w2", d.hidden, d.hidden, d.hidden},
              {"ffn_b2", 1, d.hidden, d.hidden},
              {"proj_w", d.hidden, out, d.hidden},
              {"proj_b", 1, out, d.hidden}};
  }
  throw InvalidInput("unknown model kind");
}

// Repeats a column vector (n x 1) across `cols` columns via a rank-1 product.
Tensor broadcast_cols(const Tensor& column, std::size_t cols) {
  return matmul(column, Tensor::filled({1, cols}, 1.0));
}

// Repeats a row vector (1 x n) across `rows` rows.
Tensor broadcast_rows(const Tensor& row, std::size_t rows) { return matmul(Tensor::filled({rows, 1}, 1.0), row); }

Tensor forecast_linear(const std::vector<Tensor>& p, const Tensor& x) {
  return add(matmul(p[0], x), broadcast_cols(p[1], x.cols()));
}

Tensor forecast_mlp(const std::vector<Tensor>& p, const Tensor& x) {
  const std::size_t v = x.cols();
  Tensor h = relu(add(matmul(p[0], x), broadcast_cols(p[1], v)));
  return add(matmul(p[2], h), broadcast_cols(p[3], v));
}

Tensor forecast_attention(const std::vector<Tensor>& p, const Tensor& x, std::size_t hidden) {
  const std::size_t v = x.cols();
  Tensor tokens = transpose(x);  // V x S
  Tensor embed = add(matmul(tokens, p[0]), broadcast_rows(p[1], v));
  Tensor q = matmul(embed, p[2]);
  Tensor k = matmul(embed, p[3]);
  Tensor val = matmul(embed, p[4]);
  Tensor scores = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(hidden)));
  Tensor attn = matmul(softmax(scores, 1), val);
  Tensor h1 = layer_norm(add(embed, attn), 1);
  Tensor ff = relu(add(matmul(h1, p[5]), broadcast_rows(p[6], v)));
  ff = add(matmul(ff, p[7]), broadcast_rows(p[8], v));
  Tensor h2 = layer_norm(add(h1, ff), 1);
  Tensor out = add(matmul(h2, p[9]), broadcast_rows(p[10], v));  // V x (L+T)
  return transpose(out);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "linear";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kInvertedAttention: return "inverted_attention";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "inverted_attention") return ModelKind::kInvertedAttention;
  throw InvalidInput("unknown model kind '" + std::string(name) + "' (expected linear, mlp or inverted_attention)");
}

void validate_dims(ModelKind kind, const ForecasterDims& dims) {
  if (dims.context < 1) throw InvalidInput("context length S must be >= 1");
  if (dims.block < 1) throw InvalidInput("block length T must be >= 1");
  if (dims.variates < 1) throw InvalidInput("variate count V must be >= 1");
  if (kind != ModelKind::kLinear && dims.hidden < 1) {
    throw InvalidInput(std::string(to_string(kind)) + " requires hidden >= 1");
  }
}

std::size_t parameter_count(ModelKind kind, const ForecasterDims& dims) {
  validate_dims(kind, dims);
  std::size_t n = 0;
  for (const auto& spec : layout(kind, dims)) n += spec.rows * spec.cols;
  return n;
}

Forecaster::Forecaster(ModelKind kind, ForecasterDims dims, std::vector<Parameter> params)
    : kind_(kind), dims_(dims), params_(std::move(params)) {
  validate_dims(kind_, dims_);
  const auto specs = layout(kind_, dims_);
  if (specs.size() != params_.size()) throw InvalidInput("parameter list does not match model layout");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Shape expected{specs[i].rows, specs[i].cols};
    if (params_[i].name != specs[i].name || params_[i].value.shape() != expected) {
      throw InvalidInput("parameter '" + params_[i].name + "' does not match layout entry '" + specs[i].name + "'");
    }
  }
}

std::size_t Forecaster::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::vector<double> Forecaster::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& p : params_) flat.insert(flat.end(), p.value.values().begin(), p.value.values().end());
  return flat;
}

void Forecaster::set_flat_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw InvalidInput("expected " + std::to_string(parameter_count()) + " parameters, got " +
                       std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for (auto& p : params_) {
    const std::size_t n = p.value.size();
    p.value = Tensor(p.value.shape(), std::vector<double>(flat.begin() + offset, flat.begin() + offset + n));
    offset += n;
  }
}

Forecaster init_forecaster(ModelKind kind, const ForecasterDims& dims, std::uint64_t seed) {
  validate_dims(kind, dims);
  Xoshiro256 rng(seed);
  std::vector<Parameter> params;
  for (const auto& spec : layout(kind, dims)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
    std::vector<double> values(spec.rows * spec.cols);
    for (double& w : values) w = rng.uniform(-bound, bound);
    params.push_back({spec.name, Tensor({spec.rows, spec.cols}, std::move(values))});
  }
  return Forecaster(kind, dims, std::move(params));
}

BoundForecaster bind(const Forecaster& model, Tape* tape) {
  BoundForecaster bound{&model, {}};
  bound.params.reserve(model.params().size());
  for (const auto& p : model.params()) bound.params.push_back(tape ? tape->leaf(p.value) : p.value);
  return bound;
}

Tensor forecast(const BoundForecaster& model, const Tensor& context) {
  const ForecasterDims& d = model.model->dims();
  if (context.rank() != 2 || context.rows() != d.context || context.cols() != d.variates) {
    throw InvalidInput("forecast: context must be " + std::to_string(d.context) + " x " + std::to_string(d.variates));
  }
  switch (model.model->kind()) {
    case ModelKind::kLinear: return forecast_linear(model.params, context);
    case ModelKind::kMlp: return forecast_mlp(model.params, context);
    case ModelKind::kInvertedAttention: return forecast_attention(model.params, context, d.hidden);
  }
  throw InvalidInput("unknown model kind");
}

Tensor forecast(const Forecaster& model, const Tensor& context) { return forecast(bind(model, nullptr), context); }

}  // namespace arollout
