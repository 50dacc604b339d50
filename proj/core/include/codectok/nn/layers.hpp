// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codectok/nn/graph.hpp"

namespace codectok::nn {

using ParamList = std::vector<Parameter*>;

/// y = x W + b, W [in, out]. Weights and bias start uniform(+-sqrt(1/in));
/// the bias can be zeroed with zero_bias() or left out entirely.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out, std::uint64_t seed, bool bias = true);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);
  void zero();
  void zero_bias() {
    if (has_bias_) bias_.value.fill(0.0);
  }

  int in_features() const { return weight_.value.dim(0); }
  int out_features() const { return weight_.value.dim(1); }
  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  bool has_bias() const { return has_bias_; }

 private:
  Parameter weight_;
  Parameter bias_;
  bool has_bias_ = true;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(const std::string& name, int dim);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);

 private:
  Parameter gamma_;
  Parameter beta_;
};

/// Unmasked scaled dot-product self-attention with an output projection. The
/// key projection has no bias: a key bias shifts every score in a softmax row
/// equally and would never receive a gradient.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, int dim, int heads, std::uint64_t seed);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);
  Linear& output_projection() { return out_; }
  int heads() const { return heads_; }

 private:
  int heads_ = 1;
  Linear query_;
  Linear key_;
  Linear value_;
  Linear out_;
};

/// x + Attn(LN(x)), then x + MLP(LN(x)) with a GELU hidden layer.
class PreNormBlock {
 public:
  PreNormBlock() = default;
  PreNormBlock(const std::string& name, int dim, int heads, int mlp_hidden, std::uint64_t seed);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);
  /// Zeroes both sublayer output projections, making the block the identity.
  void zero_output_projections();

 private:
  LayerNorm norm1_;
  MultiHeadAttention attention_;
  LayerNorm norm2_;
  Linear fc1_;
  Linear fc2_;
};

class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(const std::string& name, int layers, int dim, int heads, int mlp_hidden,
                   std::uint64_t seed);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);
  void zero_output_projections();
  int layers() const { return static_cast<int>(blocks_.size()); }

 private:
  std::vector<PreNormBlock> blocks_;
};

/// 3x3, stride 2, padding 1. Bias starts at zero.
class Conv2dStride2 {
 public:
  Conv2dStride2() = default;
  Conv2dStride2(const std::string& name, int in_channels, int out_channels, std::uint64_t seed);

  Var forward(Graph& g, Var x);
  void collect(ParamList& out);

 private:
  Parameter weight_;
  Parameter bias_;
};

/// Fixed sinusoidal position table, rows x dim.
Tensor sinusoidal_positions(int rows, int dim);

/// Seed for a named parameter, independent of construction order.
std::uint64_t param_seed(std::uint64_t base, const std::string& name);

}  // namespace codectok::nn
