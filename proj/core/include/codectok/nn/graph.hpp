// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Reverse-mode automatic differentiation over a per-step tape.
//
// A Graph records every op applied to its Vars. backward() walks the tape in
// reverse, then the graph is dropped; nothing outlives a training step.
// Parameters enter through Graph::param and keep their gradient on the graph
// until collected, so several graphs may run concurrently over the same
// weights and have their gradients summed in a fixed order afterwards.

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "codectok/nn/tensor.hpp"

namespace codectok::nn {

class Graph;

/// Handle to a node on a Graph.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  /// Valid until the next node is recorded on the same graph.
  const Tensor& value() const;
  const std::vector<int>& shape() const { return value().shape(); }
};

class Graph {
 public:
  using Backward = std::function<void(Graph&, int)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Constant leaf; receives a gradient but no parameter is updated from it.
  Var input(Tensor value);
  /// Leaf bound to a parameter. Binding the same parameter twice returns the
  /// same node.
  Var param(Parameter& p);

  Var record(Tensor value, std::vector<int> inputs, Backward backward);

  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& grad(int id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  Tensor& grad_mut(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Tensor& grad(Var v) const { return grad(v.id); }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(loss)/d(loss) = 1 for a single-element loss and propagates.
  void backward(Var loss);

  /// (parameter, gradient) for every bound parameter, in binding order.
  std::vector<std::pair<Parameter*, const Tensor*>> param_grads() const;
  /// Adds this graph's parameter gradients into Parameter::grad.
  void accumulate_param_grads() const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> inputs;
    Backward backward;
    Parameter* parameter = nullptr;
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, int>> bound_;
};

// Ops. Matrices are rank-2 [rows, cols]; conv inputs are [H, W, C].

Var matmul(Var a, Var b);              // [L,K] x [K,N]
Var matmul_nt(Var a, Var b);           // [L,K] x [N,K]^T
Var add(Var a, Var b);                 // same shape
Var add_bias(Var x, Var bias);         // [L,N] + [N]
Var scale(Var x, double s);
Var relu(Var x);
Var gelu(Var x);                       // tanh approximation
Var tanh(Var x);
Var softmax_rows(Var x);
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
Var slice_rows(Var x, int begin, int end);
Var slice_cols(Var x, int begin, int end);
Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var reshape(Var x, std::vector<int> shape);
/// Stride 2, padding 1, 3x3 kernel. x [H,W,Cin], w [3,3,Cin,Cout], b [Cout].
Var conv2d_stride2(Var x, Var w, Var b);
/// [L,d] -> [1,d].
Var mean_rows(Var x);
/// (1/rows) * sum_i ||target_i - pred_i||^2, as a [1] tensor.
Var row_mse(Var pred, Var target);
/// sum(x * weights), as a [1] tensor.
Var weighted_sum(Var x, const Tensor& weights);
/// Mean of several [1] tensors.
Var mean_scalars(const std::vector<Var>& parts);

}  // namespace codectok::nn
