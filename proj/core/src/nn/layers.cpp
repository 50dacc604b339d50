// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/nn/layers.hpp"

#include <cmath>

#include "codectok/rng.hpp"

namespace codectok::nn {

std::uint64_t param_seed(std::uint64_t base, const std::string& name) {
  std::uint64_t h = mix64(base);
  for (unsigned char ch : name) h = hash_combine(h, ch);
  return h;
}

Linear::Linear(const std::string& name, int in, int out, std::uint64_t seed, bool bias)
    : weight_(name + ".weight", Tensor::matrix(in, out)), has_bias_(bias) {
  const double bound = std::sqrt(1.0 / in);
  init_uniform(weight_.value, param_seed(seed, weight_.name), bound);
  if (has_bias_) {
    bias_ = Parameter(name + ".bias", Tensor({out}));
    init_uniform(bias_.value, param_seed(seed, bias_.name), bound);
  }
}

Var Linear::forward(Graph& g, Var x) {
  const Var y = matmul(x, g.param(weight_));
  return has_bias_ ? add_bias(y, g.param(bias_)) : y;
}

void Linear::collect(ParamList& out) {
  out.push_back(&weight_);
  if (has_bias_) out.push_back(&bias_);
}

void Linear::zero() {
  weight_.value.fill(0.0);
  if (has_bias_) bias_.value.fill(0.0);
}

LayerNorm::LayerNorm(const std::string& name, int dim)
    : gamma_(name + ".gamma", Tensor({dim}, 1.0)), beta_(name + ".beta", Tensor({dim}, 0.0)) {}

Var LayerNorm::forward(Graph& g, Var x) { return layer_norm(x, g.param(gamma_), g.param(beta_)); }

void LayerNorm::collect(ParamList& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

MultiHeadAttention::MultiHeadAttention(const std::string& name, int dim, int heads, std::uint64_t seed)
    : heads_(heads),
      query_(name + ".query", dim, dim, seed),
      key_(name + ".key", dim, dim, seed, false),
      value_(name + ".value", dim, dim, seed),
      out_(name + ".out", dim, dim, seed) {
  if (heads <= 0 || dim % heads != 0)
    throw ShapeError(name + ": dim " + std::to_string(dim) + " is not divisible by " +
                     std::to_string(heads) + " heads");
}

Var MultiHeadAttention::forward(Graph& g, Var x) {
  const int dim = x.value().dim(1);
  if (dim % heads_ != 0) throw ShapeError("attention: width not divisible by heads");
  const int head_dim = dim / heads_;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Var q = query_.forward(g, x);
  const Var k = key_.forward(g, x);
  const Var v = value_.forward(g, x);
  std::vector<Var> heads;
  heads.reserve(static_cast<std::size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    const int c0 = h * head_dim, c1 = c0 + head_dim;
    const Var scores = scale(matmul_nt(slice_cols(q, c0, c1), slice_cols(k, c0, c1)), inv_sqrt);
    heads.push_back(matmul(softmax_rows(scores), slice_cols(v, c0, c1)));
  }
  const Var merged = heads_ == 1 ? heads.front() : concat_cols(heads);
  return out_.forward(g, merged);
}

void MultiHeadAttention::collect(ParamList& out) {
  query_.collect(out);
  key_.collect(out);
  value_.collect(out);
  out_.collect(out);
}

PreNormBlock::PreNormBlock(const std::string& name, int dim, int heads, int mlp_hidden,
                           std::uint64_t seed)
    : norm1_(name + ".norm1", dim),
      attention_(name + ".attn", dim, heads, seed),
      norm2_(name + ".norm2", dim),
      fc1_(name + ".fc1", dim, mlp_hidden, seed),
      fc2_(name + ".fc2", mlp_hidden, dim, seed) {}

Var PreNormBlock::forward(Graph& g, Var x) {
  const Var h = add(x, attention_.forward(g, norm1_.forward(g, x)));
  const Var m = fc2_.forward(g, gelu(fc1_.forward(g, norm2_.forward(g, h))));
  return add(h, m);
}

void PreNormBlock::collect(ParamList& out) {
  norm1_.collect(out);
  attention_.collect(out);
  norm2_.collect(out);
  fc1_.collect(out);
  fc2_.collect(out);
}

void PreNormBlock::zero_output_projections() {
  attention_.output_projection().zero();
  fc2_.zero();
}

TransformerStack::TransformerStack(const std::string& name, int layers, int dim, int heads,
                                   int mlp_hidden, std::uint64_t seed) {
  blocks_.reserve(static_cast<std::size_t>(layers));
  for (int i = 0; i < layers; ++i)
    blocks_.emplace_back(name + ".block" + std::to_string(i), dim, heads, mlp_hidden, seed);
}

Var TransformerStack::forward(Graph& g, Var x) {
  for (auto& b : blocks_) x = b.forward(g, x);
  return x;
}

void TransformerStack::collect(ParamList& out) {
  for (auto& b : blocks_) b.collect(out);
}

void TransformerStack::zero_output_projections() {
  for (auto& b : blocks_) b.zero_output_projections();
}

Conv2dStride2::Conv2dStride2(const std::string& name, int in_channels, int out_channels,
                             std::uint64_t seed)
    : weight_(name + ".weight", Tensor({3, 3, in_channels, out_channels})),
      bias_(name + ".bias", Tensor({out_channels})) {
  init_uniform(weight_.value, param_seed(seed, weight_.name), std::sqrt(1.0 / (9.0 * in_channels)));
}

Var Conv2dStride2::forward(Graph& g, Var x) {
  return conv2d_stride2(x, g.param(weight_), g.param(bias_));
}

void Conv2dStride2::collect(ParamList& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Tensor sinusoidal_positions(int rows, int dim) {
  Tensor t = Tensor::matrix(rows, dim);
  for (int p = 0; p < rows; ++p) {
    for (int i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      t.at(p, i) = (i % 2 == 0) ? std::sin(p * freq) : std::cos(p * freq);
    }
  }
  return t;
}

}  // namespace codectok::nn
