// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Dense double-precision tensors and a define-by-run reverse-mode tape.
//
// A Tensor is a plain value (shape + row-major data). Tensors created through
// Tape::leaf carry a handle to a node on that tape; every op whose operands
// include such a tensor records a node with its local gradient rule. Ops on
// pure constants just compute values and record nothing, so the same model
// code serves both training (taped) and inference (untaped).
//
// Supported ranks are 1 and 2. Scalars are rank-1 tensors of extent 1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace arollout {

using Shape = std::vector<std::size_t>;

class Tape;

enum class OpKind {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kMatMul,
  kRelu,
  kAbs,
  kMean,
  kSum,
  kScale,
  kTranspose,
  kConcat,
  kSlice,
  kSoftmax,
  kLayerNorm,
};

std::string_view op_name(OpKind op);

struct NodeRef {
  Tape* tape = nullptr;
  std::size_t id = 0;
};

class Tensor {
 public:
  Tensor() = default;
  // Throws InvalidInput when product(shape) != values.size() or an extent is
  // zero.
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  // For rank-2 tensors; a rank-1 tensor reads as a column (n x 1).
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() == 2 ? shape_[1] : 1; }

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  // Value of a single-element tensor.
  double item() const;

  bool on_tape() const { return node_.has_value(); }
  const std::optional<NodeRef>& node() const { return node_; }

  // Same values, no tape handle.
  Tensor detached() const { return Tensor(shape_, values_); }

 private:
  friend class Tape;

  Shape shape_;
  std::vector<double> values_;
  std::optional<NodeRef> node_;
};

// Gradient of one scalar with respect to every node on a tape.
class Gradients {
 public:
  Gradients() = default;

  // d loss / d t. Zero-filled when t is a constant, lives on another tape, or
  // is not an ancestor of the loss.
  Tensor of(const Tensor& t) const;
  bool reached(const Tensor& t) const;

 private:
  friend class Tape;

  const Tape* tape_ = nullptr;
  std::vector<std::optional<std::vector<double>>> table_;
};

// Local gradient rule: receives d loss / d output and adds the contribution
// for each operand into the matching span. Spans for untaped operands are
// empty and must be skipped.
using BackwardFn =
    std::function<void(std::span<const double> grad_out, std::span<const std::span<double>> grad_in)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a differentiable leaf.
  Tensor leaf(Shape shape, std::vector<double> values);
  Tensor leaf(const Tensor& value);

  // Records an op result. `operands` are the op's inputs in order; the
  // ones carrying a node on this tape become the node's parents.
  Tensor record(OpKind op, std::span<const Tensor* const> operands, Tensor result, BackwardFn backward);

  // Reverse sweep from a single-element tensor on this tape.
  Gradients backward(const Tensor& loss) const;

  std::size_t node_count() const { return nodes_.size(); }
  OpKind node_op(std::size_t id) const { return nodes_.at(id).op; }

  // Smallest |argument| seen by any taped relu/abs, and a hash of the sign
  // of every such argument in recording order. Gradient checks compare
  // signatures to detect finite-difference steps that straddle a kink.
  double min_kink_margin() const { return min_kink_margin_; }
  std::uint64_t kink_signature() const { return kink_signature_; }
  void note_kink_arguments(std::span<const double> args);

  // Test hook: scales the incoming gradient of every node of kind `op` by
  // `factor` during backward. Used to prove that gradient checks catch a
  // broken local rule.
  void inject_fault(OpKind op, double factor);

 private:
  struct Node {
    OpKind op = OpKind::kLeaf;
    Shape shape;
    std::vector<std::optional<std::size_t>> parents;  // aligned with operands
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  double min_kink_margin_ = std::numeric_limits<double>::infinity();
  std::uint64_t kink_signature_ = 0xcbf29ce484222325ULL;
  std::optional<OpKind> fault_op_;
  double fault_factor_ = 1.0;
};

// Convenience wrapper for loss.node()->tape->backward(loss). Throws
// InvalidInput for constants and non-scalars.
Gradients backward(const Tensor& loss);

// ---- op set -----------------------------------------------------------------
// All ops throw InvalidInput on non-conforming shapes.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);  // subgradient 0 at 0
Tensor abs(const Tensor& a);   // subgradient 0 at 0
Tensor mean(const Tensor& a);  // -> scalar
Tensor sum(const Tensor& a);   // -> scalar
Tensor scale(const Tensor& a, double factor);
Tensor transpose(const Tensor& a);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor softmax(const Tensor& a, std::size_t axis);
Tensor layer_norm(const Tensor& a, std::size_t axis, double eps = 1e-5);

// Identity forward; the result carries no tape handle, so nothing upstream
// of it receives gradient through this path.
Tensor stop_gradient(const Tensor& a);

}  // namespace arollout
