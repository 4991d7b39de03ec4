// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "laytoken/tensor.hpp"

namespace laytoken::nn {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t index = 0;

  const Tensor& value() const;
  double scalar() const { return value()[0]; }
};

/// Reverse-mode gradient tape. Every operation appends a node holding its
/// forward value and, when recording, a closure that pushes the node's
/// gradient into its inputs. backward() replays closures in reverse creation
/// order and adds the resulting gradients into the Parameter accumulators.
///
/// A non-recording tape evaluates the same kernels without storing closures,
/// which is what inference and finite-difference probes use.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Tensor value);
  /// Trainable leaf; gradients flow into `p.grad` on backward().
  Var parameter(Parameter& p);
  /// Frozen leaf; the parameter is read but never receives gradient.
  Var parameter(const Parameter& p);

  const Tensor& value(std::size_t i) const;
  const Tensor& value(Var v) const { return value(v.index); }
  bool requires_grad(std::size_t i) const { return nodes_[i].requires_grad; }
  bool requires_grad(Var v) const { return requires_grad(v.index); }
  /// Gradient buffer of node `i`, allocated (zeroed) on first access.
  Tensor& grad(std::size_t i);
  bool has_grad(std::size_t i) const { return !nodes_[i].grad.empty(); }

  Var push(Tensor value, bool requires_grad, Backward backward);

  /// Seeds d(root)/d(root) = 1 for a single-element root and propagates.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* view = nullptr;
    Tensor grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    Backward backward;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> params_;
  bool record_;
};

// ---------------------------------------------------------------------------
// Differentiable operations. Shapes are [rows x cols]; vectors are 1 x n.

/// a[m x k] * b[k x n]
Var matmul(Var a, Var b);
/// x[m x k] * w[k x n] + bias[n]
Var linear(Var x, Var w, Var bias);
Var linear(Var x, Var w);
Var add(Var a, Var b);
Var scale(Var a, double factor);
/// Adds row (i mod table.rows) of `table` to row i of `x`.
Var add_cyclic_rows(Var x, Var table);
/// Row r of x times row (r mod table.rows) of table, elementwise.
Var mul_cyclic_rows(Var x, Var table);
Var layer_norm(Var x, Var gamma, Var beta, double eps);
/// tanh-approximated GELU.
Var gelu(Var x);
Var sigmoid(Var x);
Var gather_rows(Var x, std::vector<std::size_t> rows);
/// Builds a [total_rows x cols] matrix: row k of parts[p].first lands on row
/// parts[p].second[k]. Every destination row must be covered exactly once.
Var assemble_rows(const std::vector<std::pair<Var, std::vector<std::size_t>>>& parts,
                  std::size_t total_rows);

/// Multi-head causal self-attention with rotary encoding. `qkv` holds
/// [q | k | v] per row ([S x 3d]). Row i attends rows 0..i by sequence index;
/// `positions` only drive the rotary angles and may repeat.
Var causal_self_attention(Var qkv, std::span<const std::int64_t> positions, std::size_t n_heads,
                          double rope_base);

/// Single-query attention pooling: one query row [1 x d] attends within each
/// consecutive group of `group` key/value rows, producing one row per group.
Var pooled_attention(Var query, Var keys, Var values, std::size_t group);

/// Sum over rows of -log softmax(logits[r])[targets[r]].
Var cross_entropy_sum(Var logits, std::vector<std::size_t> targets);
/// Sum over rows of mean over columns of (pred - target)^2.
Var mse_sum(Var pred, Tensor target);
/// Sum of squared entries.
Var sum_squares(Var x);

// ---------------------------------------------------------------------------
// Raw kernels shared by the graph ops and by reference computations in tests.
namespace kernels {

/// out[m x n] = x[m x k] * w[k x n] (+ bias).
void linear_forward(const double* x, std::size_t m, std::size_t k, const double* w, std::size_t n,
                    const double* bias, double* out);
/// -log softmax(logits)[target], via a max-shifted log-sum-exp.
double cross_entropy_row(std::span<const double> logits, std::size_t target);
/// Softmax of `x` into `out` (may alias).
void softmax(std::span<const double> x, std::span<double> out);

}  // namespace kernels

}  // namespace laytoken::nn
