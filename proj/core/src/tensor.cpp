// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "arollout/error.hpp"

namespace arollout {

namespace {

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

std::size_t product(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

void require_rank(const Tensor& t, std::size_t min_rank, std::size_t max_rank, const char* op) {
  if (t.rank() < min_rank || t.rank() > max_rank) {
    throw InvalidInput(std::string(op) + ": unsupported rank " + std::to_string(t.rank()) + " for shape " +
                       shape_str(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw InvalidInput(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
  }
}

// The tape shared by every taped operand, or nullptr if all are constants.
Tape* common_tape(std::span<const Tensor* const> operands) {
  Tape* tape = nullptr;
  for (const Tensor* t : operands) {
    if (!t->on_tape()) continue;
    Tape* other = t->node()->tape;
    if (tape && tape != other) throw InvalidInput("operands live on different tapes");
    tape = other;
  }
  return tape;
}

// Walks the 1-D lanes of a rank-1/2 tensor along `axis`.
struct Lanes {
  std::size_t count;
  std::size_t length;
  std::size_t stride;
  std::size_t lane_stride;
};

Lanes lanes_along(const Tensor& t, std::size_t axis, const char* op) {
  require_rank(t, 1, 2, op);
  if (axis >= t.rank()) throw InvalidInput(std::string(op) + ": axis out of range");
  if (t.rank() == 1) return {1, t.size(), 1, 0};
  const std::size_t r = t.shape()[0];
  const std::size_t c = t.shape()[1];
  if (axis == 1) return {r, c, 1, c};
  return {c, r, c, 1};
}

Tensor finish(OpKind op, std::initializer_list<const Tensor*> operands, Tensor result, BackwardFn fn) {
  std::span<const Tensor* const> ops(operands.begin(), operands.size());
  Tape* tape = common_tape(ops);
  if (!tape) return result;
  return tape->record(op, ops, std::move(result), std::move(fn));
}

}  // namespace

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kRelu: return "relu";
    case OpKind::kAbs: return "abs";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kScale: return "scale";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLayerNorm: return "layer_norm";
  }
  return "unknown";
}

// ---- Tensor -----------------------------------------------------------------

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_.empty()) throw InvalidInput("tensor shape must have at least one extent");
  for (std::size_t e : shape_) {
    if (e == 0) throw InvalidInput("tensor extents must be positive, got " + shape_str(shape_));
  }
  if (product(shape_) != values_.size()) {
    throw InvalidInput("shape " + shape_str(shape_) + " needs " + std::to_string(product(shape_)) +
                       " values, got " + std::to_string(values_.size()));
  }
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
  const std::size_t n = product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

double Tensor::item() const {
  if (values_.size() != 1) throw InvalidInput("item() on tensor of shape " + shape_str(shape_));
  return values_[0];
}

// ---- Gradients --------------------------------------------------------------

bool Gradients::reached(const Tensor& t) const {
  if (!t.on_tape() || t.node()->tape != tape_) return false;
  const std::size_t id = t.node()->id;
  return id < table_.size() && table_[id].has_value();
}

Tensor Gradients::of(const Tensor& t) const {
  if (!reached(t)) return Tensor::zeros(t.shape());
  return Tensor(t.shape(), *table_[t.node()->id]);
}

// ---- Tape -------------------------------------------------------------------

Tensor Tape::leaf(Shape shape, std::vector<double> values) { return leaf(Tensor(std::move(shape), std::move(values))); }

Tensor Tape::leaf(const Tensor& value) {
  Tensor out = value.detached();
  nodes_.push_back(Node{OpKind::kLeaf, out.shape(), {}, nullptr});
  out.node_ = NodeRef{this, nodes_.size() - 1};
  return out;
}

Tensor Tape::record(OpKind op, std::span<const Tensor* const> operands, Tensor result, BackwardFn backward) {
  Node node{op, result.shape(), {}, std::move(backward)};
  node.parents.reserve(operands.size());
  for (const Tensor* t : operands) {
    if (t->on_tape()) {
      if (t->node()->tape != this) throw InvalidInput("operand recorded on a different tape");
      node.parents.emplace_back(t->node()->id);
    } else {
      node.parents.emplace_back(std::nullopt);
    }
  }
  nodes_.push_back(std::move(node));
  result.node_ = NodeRef{this, nodes_.size() - 1};
  return result;
}

void Tape::note_kink_arguments(std::span<const double> args) {
  for (double x : args) {
    min_kink_margin_ = std::min(min_kink_margin_, std::abs(x));
    const std::uint64_t code = x > 0.0 ? 1 : (x < 0.0 ? 2 : 3);
    kink_signature_ = (kink_signature_ ^ code) * 0x100000001b3ULL;
  }
}

void Tape::inject_fault(OpKind op, double factor) {
  fault_op_ = op;
  fault_factor_ = factor;
}

Gradients Tape::backward(const Tensor& loss) const {
  if (!loss.on_tape() || loss.node()->tape != this) throw InvalidInput("backward: loss is not recorded on this tape");
  if (loss.size() != 1) throw InvalidInput("backward: loss must be a scalar, got " + shape_str(loss.shape()));

  Gradients grads;
  grads.tape_ = this;
  grads.table_.resize(nodes_.size());
  grads.table_[loss.node()->id] = std::vector<double>{1.0};

  std::vector<std::span<double>> in_spans;
  for (std::size_t id = loss.node()->id + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!grads.table_[id] || !node.backward) continue;

    std::vector<double> grad_out = *grads.table_[id];
    if (fault_op_ && *fault_op_ == node.op) {
      for (double& g : grad_out) g *= fault_factor_;
    }
    in_spans.assign(node.parents.size(), std::span<double>());
    for (std::size_t i = 0; i < node.parents.size(); ++i) {
      if (!node.parents[i]) continue;
      auto& slot = grads.table_[*node.parents[i]];
      if (!slot) slot = std::vector<double>(product(nodes_[*node.parents[i]].shape), 0.0);
      in_spans[i] = *slot;
    }
    node.backward(grad_out, in_spans);
  }
  return grads;
}

Gradients backward(const Tensor& loss) {
  if (!loss.on_tape()) throw InvalidInput("backward: loss is a constant");
  return loss.node()->tape->backward(loss);
}

// ---- ops --------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return finish(OpKind::kAdd, {&a, &b}, Tensor(a.shape(), std::move(v)),
                [](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (auto dst : in) {
                    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
                  }
                });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return finish(OpKind::kSub, {&a, &b}, Tensor(a.shape(), std::move(v)),
                [](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < in[0].size(); ++i) in[0][i] += g[i];
                  for (std::size_t i = 0; i < in[1].size(); ++i) in[1][i] -= g[i];
                });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  std::vector<double> av(a.values().begin(), a.values().end());
  std::vector<double> bv(b.values().begin(), b.values().end());
  return finish(OpKind::kMul, {&a, &b}, Tensor(a.shape(), std::move(v)),
                [av = std::move(av), bv = std::move(bv)](std::span<const double> g,
                                                         std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < in[0].size(); ++i) in[0][i] += g[i] * bv[i];
                  for (std::size_t i = 0; i < in[1].size(); ++i) in[1][i] += g[i] * av[i];
                });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, 2, "matmul");
  require_rank(b, 2, 2, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw InvalidInput("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  std::vector<double> v(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) v[i * n + j] += aip * bv[p * n + j];
    }
  }
  std::vector<double> a_copy(av.begin(), av.end());
  std::vector<double> b_copy(bv.begin(), bv.end());
  return finish(OpKind::kMatMul, {&a, &b}, Tensor({m, n}, std::move(v)),
                [m, k, n, a_copy = std::move(a_copy), b_copy = std::move(b_copy)](
                    std::span<const double> g, std::span<const std::span<double>> in) {
                  // dA = G B^T, dB = A^T G
                  if (!in[0].empty()) {
                    for (std::size_t i = 0; i < m; ++i) {
                      for (std::size_t p = 0; p < k; ++p) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * b_copy[p * n + j];
                        in[0][i * k + p] += acc;
                      }
                    }
                  }
                  if (!in[1].empty()) {
                    for (std::size_t i = 0; i < m; ++i) {
                      for (std::size_t p = 0; p < k; ++p) {
                        const double aip = a_copy[i * k + p];
                        for (std::size_t j = 0; j < n; ++j) in[1][p * n + j] += aip * g[i * n + j];
                      }
                    }
                  }
                });
}

namespace {

void note_kink(const Tensor& a) {
  if (a.on_tape()) a.node()->tape->note_kink_arguments(a.values());
}

}  // namespace

Tensor relu(const Tensor& a) {
  std::vector<double> v(a.size());
  std::vector<char> active(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    active[i] = a[i] > 0.0;
    v[i] = active[i] ? a[i] : 0.0;
  }
  note_kink(a);
  return finish(OpKind::kRelu, {&a}, Tensor(a.shape(), std::move(v)),
                [active = std::move(active)](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < in[0].size(); ++i) {
                    if (active[i]) in[0][i] += g[i];
                  }
                });
}

Tensor abs(const Tensor& a) {
  std::vector<double> v(a.size());
  std::vector<double> sign(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::abs(a[i]);
    sign[i] = a[i] > 0.0 ? 1.0 : (a[i] < 0.0 ? -1.0 : 0.0);
  }
  note_kink(a);
  return finish(OpKind::kAbs, {&a}, Tensor(a.shape(), std::move(v)),
                [sign = std::move(sign)](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < in[0].size(); ++i) in[0][i] += g[i] * sign[i];
                });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.values()) s += x;
  return finish(OpKind::kSum, {&a}, Tensor::scalar(s),
                [](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (double& d : in[0]) d += g[0];
                });
}

Tensor mean(const Tensor& a) {
  double s = 0.0;
  for (double x : a.values()) s += x;
  const double inv = 1.0 / static_cast<double>(a.size());
  return finish(OpKind::kMean, {&a}, Tensor::scalar(s * inv),
                [inv](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (double& d : in[0]) d += g[0] * inv;
                });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * factor;
  return finish(OpKind::kScale, {&a}, Tensor(a.shape(), std::move(v)),
                [factor](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < in[0].size(); ++i) in[0][i] += g[i] * factor;
                });
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, 2, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) v[j * r + i] = a[i * c + j];
  }
  return finish(OpKind::kTranspose, {&a}, Tensor({c, r}, std::move(v)),
                [r, c](std::span<const double> g, std::span<const std::span<double>> in) {
                  for (std::size_t i = 0; i < r; ++i) {
                    for (std::size_t j = 0; j < c; ++j) in[0][i * c + j] += g[j * r + i];
                  }
                });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw InvalidInput("concat: no inputs");
  const Tensor& first = parts.front();
  require_rank(first, 1, 2, "concat");
  if (axis >= first.rank()) throw InvalidInput("concat: axis out of range");

  // Views every part as (outer, inner) blocks: rows of a rank-2 tensor when
  // concatenating along columns, one block otherwise.
  const bool by_cols = first.rank() == 2 && axis == 1;
  const std::size_t outer = by_cols ? first.rows() : 1;
  std::vector<std::size_t> inner(parts.size());
  std::size_t total_axis = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& t = parts[p];
    if (t.rank() != first.rank()) throw InvalidInput("concat: rank mismatch");
    for (std::size_t d = 0; d < t.rank(); ++d) {
      if (d != axis && t.shape()[d] != first.shape()[d]) {
        throw InvalidInput("concat: shape mismatch " + shape_str(first.shape()) + " vs " + shape_str(t.shape()));
      }
    }
    total_axis += t.shape()[axis];
    inner[p] = t.size() / outer;
  }
  Shape out_shape = first.shape();
  out_shape[axis] = total_axis;
  const std::size_t row_len = std::accumulate(inner.begin(), inner.end(), std::size_t{0});

  std::vector<double> v;
  v.reserve(outer * row_len);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t p = 0; p < parts.size(); ++p) {
      auto src = parts[p].values().subspan(o * inner[p], inner[p]);
      v.insert(v.end(), src.begin(), src.end());
    }
  }

  Tensor result(out_shape, std::move(v));
  std::vector<const Tensor*> ptrs;
  ptrs.reserve(parts.size());
  for (const Tensor& t : parts) ptrs.push_back(&t);
  Tape* tape = common_tape(ptrs);
  if (!tape) return result;
  return tape->record(OpKind::kConcat, ptrs, std::move(result),
                      [outer, inner, row_len](std::span<const double> g, std::span<const std::span<double>> in) {
                        for (std::size_t o = 0; o < outer; ++o) {
                          std::size_t offset = o * row_len;
                          for (std::size_t p = 0; p < in.size(); ++p) {
                            if (!in[p].empty()) {
                              for (std::size_t i = 0; i < inner[p]; ++i) in[p][o * inner[p] + i] += g[offset + i];
                            }
                            offset += inner[p];
                          }
                        }
                      });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  require_rank(a, 1, 2, "slice");
  if (axis >= a.rank()) throw InvalidInput("slice: axis out of range");
  if (begin >= end || end > a.shape()[axis]) {
    throw InvalidInput("slice: bounds [" + std::to_string(begin) + "," + std::to_string(end) + ") invalid for axis " +
                       std::to_string(axis) + " of shape " + shape_str(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const std::size_t rows = a.rank() == 2 ? a.rows() : a.size();
  const std::size_t cols = a.rank() == 2 ? a.cols() : 1;
  const bool by_rows = axis == 0;
  const std::size_t r0 = by_rows ? begin : 0, r1 = by_rows ? end : rows;
  const std::size_t c0 = by_rows ? 0 : begin, c1 = by_rows ? cols : end;

  std::vector<double> v;
  v.reserve((r1 - r0) * (c1 - c0));
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = c0; c < c1; ++c) v.push_back(a[r * cols + c]);
  }
  return finish(OpKind::kSlice, {&a}, Tensor(out_shape, std::move(v)),
                [r0, r1, c0, c1, cols](std::span<const double> g, std::span<const std::span<double>> in) {
                  std::size_t idx = 0;
                  for (std::size_t r = r0; r < r1; ++r) {
                    for (std::size_t c = c0; c < c1; ++c) in[0][r * cols + c] += g[idx++];
                  }
                });
}

Tensor softmax(const Tensor& a, std::size_t axis) {
  const Lanes lanes = lanes_along(a, axis, "softmax");
  std::vector<double> y(a.size());
  for (std::size_t l = 0; l < lanes.count; ++l) {
    const std::size_t base = l * lanes.lane_stride;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lanes.length; ++i) mx = std::max(mx, a[base + i * lanes.stride]);
    double z = 0.0;
    for (std::size_t i = 0; i < lanes.length; ++i) {
      const std::size_t idx = base + i * lanes.stride;
      y[idx] = std::exp(a[idx] - mx);
      z += y[idx];
    }
    for (std::size_t i = 0; i < lanes.length; ++i) y[base + i * lanes.stride] /= z;
  }
  std::vector<double> y_copy = y;
  return finish(OpKind::kSoftmax, {&a}, Tensor(a.shape(), std::move(y)),
                [lanes, y = std::move(y_copy)](std::span<const double> g, std::span<const std::span<double>> in) {
                  // dx = y * (g - <g, y>) per lane
                  for (std::size_t l = 0; l < lanes.count; ++l) {
                    const std::size_t base = l * lanes.lane_stride;
                    double dot = 0.0;
                    for (std::size_t i = 0; i < lanes.length; ++i) {
                      const std::size_t idx = base + i * lanes.stride;
                      dot += g[idx] * y[idx];
                    }
                    for (std::size_t i = 0; i < lanes.length; ++i) {
                      const std::size_t idx = base + i * lanes.stride;
                      in[0][idx] += y[idx] * (g[idx] - dot);
                    }
                  }
                });
}

Tensor layer_norm(const Tensor& a, std::size_t axis, double eps) {
  const Lanes lanes = lanes_along(a, axis, "layer_norm");
  std::vector<double> y(a.size());
  std::vector<double> inv_std(lanes.count);
  const double n = static_cast<double>(lanes.length);
  for (std::size_t l = 0; l < lanes.count; ++l) {
    const std::size_t base = l * lanes.lane_stride;
    double mu = 0.0;
    for (std::size_t i = 0; i < lanes.length; ++i) mu += a[base + i * lanes.stride];
    mu /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < lanes.length; ++i) {
      const double d = a[base + i * lanes.stride] - mu;
      var += d * d;
    }
    var /= n;
    inv_std[l] = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < lanes.length; ++i) {
      const std::size_t idx = base + i * lanes.stride;
      y[idx] = (a[idx] - mu) * inv_std[l];
    }
  }
  std::vector<double> y_copy = y;
  return finish(OpKind::kLayerNorm, {&a}, Tensor(a.shape(), std::move(y)),
                [lanes, n, y = std::move(y_copy), inv_std = std::move(inv_std)](
                    std::span<const double> g, std::span<const std::span<double>> in) {
                  // dx = inv_std * (g - mean(g) - y * mean(g * y)) per lane
                  for (std::size_t l = 0; l < lanes.count; ++l) {
                    const std::size_t base = l * lanes.lane_stride;
                    double g_mean = 0.0, gy_mean = 0.0;
                    for (std::size_t i = 0; i < lanes.length; ++i) {
                      const std::size_t idx = base + i * lanes.stride;
                      g_mean += g[idx];
                      gy_mean += g[idx] * y[idx];
                    }
                    g_mean /= n;
                    gy_mean /= n;
                    for (std::size_t i = 0; i < lanes.length; ++i) {
                      const std::size_t idx = base + i * lanes.stride;
                      in[0][idx] += inv_std[l] * (g[idx] - g_mean - y[idx] * gy_mean);
                    }
                  }
                });
}

Tensor stop_gradient(const Tensor& a) { return a.detached(); }

}  // namespace arollout
