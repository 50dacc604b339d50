// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codectok/delta_encoder.hpp"
#include "codectok/nn/layers.hpp"
#include "codectok/rng.hpp"

namespace codectok::testing {

using nn::Graph;
using nn::Tensor;
using nn::Var;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double stddev = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.normal(0.0, stddev);
  return t;
}

// Keeps ReLU inputs away from the kink so central differences stay smooth.
Tensor away_from_zero(Tensor t) {
  for (double& v : t.data())
    if (std::abs(v) < 0.05) v = v < 0 ? -0.5 : 0.5;
  return t;
}

}  // namespace

GradCheckResult check_gradients(const std::vector<Leaf>& leaves, const GraphBuilder& build, std::uint64_t seed,
                                const GradCheckOptions& options) {
  Rng rng(hash_combine(seed, 0x6763ULL));
  Tensor weights;

  auto loss_of = [&](Graph& g, std::vector<Var>& vars) {
    vars.clear();
    const Var out = build(g, vars);
    if (vars.size() != leaves.size()) throw std::logic_error("gradcheck: builder created wrong number of leaves");
    if (weights.size() == 0) weights = random_tensor(out.value().shape(), rng);
    return nn::weighted_sum(out, weights);
  };
  auto evaluate = [&]() {
    Graph g;
    std::vector<Var> vars;
    return loss_of(g, vars).value()[0];
  };

  std::vector<Tensor> analytic;
  {
    Graph g;
    std::vector<Var> vars;
    const Var loss = loss_of(g, vars);
    g.backward(loss);
    for (const Var& v : vars) analytic.push_back(g.grad(v));
  }

  GradCheckResult result;
  const double h = options.step;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    Tensor& x = *leaves[li].value;
    const Tensor& a = analytic[li];
    if (std::all_of(a.data().begin(), a.data().end(), [](double v) { return v == 0.0; }))
      result.zero_grad_leaves.push_back(leaves[li].name);

    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t count = idx.size();
    if (options.max_probes_per_leaf > 0 && options.max_probes_per_leaf < count) {
      count = options.max_probes_per_leaf;
      for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.next() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
    }

    double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
      const std::size_t i = idx[p];
      const double saved = x[i];
      x[i] = saved + h;
      const double up = evaluate();
      x[i] = saved - h;
      const double down = evaluate();
      x[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double diff = std::abs(a[i] - numeric);
      const double rel = diff / std::max({std::abs(a[i]), std::abs(numeric), kRelFloor});
      diff_sq += diff * diff;
      a_sq += a[i] * a[i];
      n_sq += numeric * numeric;
      ++result.probes;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = leaves[li].name + "[" + std::to_string(i) + "] analytic " + std::to_string(a[i]) +
                       " numeric " + std::to_string(numeric);
      }
    }
    const double denom = std::max(std::sqrt(a_sq) + std::sqrt(n_sq), kRelFloor);
    result.max_norm_rel_error = std::max(result.max_norm_rel_error, std::sqrt(diff_sq) / denom);
  }
  return result;
}

namespace {

// Tensors-only op case: leaves are fresh random tensors owned by the case.
GradCase tensor_case(std::string name, std::vector<std::vector<int>> shapes,
                     std::function<Var(Graph&, const std::vector<Var>&)> op, bool avoid_kinks = false) {
  return {name, [name, shapes, op, avoid_kinks](std::uint64_t seed) {
            Rng rng(hash_combine(seed, 0x7463ULL));
            std::vector<Tensor> storage;
            for (const auto& s : shapes) {
              Tensor t = random_tensor(s, rng);
              storage.push_back(avoid_kinks ? away_from_zero(std::move(t)) : std::move(t));
            }
            std::vector<Leaf> leaves;
            for (std::size_t i = 0; i < storage.size(); ++i)
              leaves.push_back({name + ".in" + std::to_string(i), &storage[i]});
            return check_gradients(
                leaves,
                [&](Graph& g, std::vector<Var>& vars) {
                  for (auto& t : storage) vars.push_back(g.input(t));
                  return op(g, vars);
                },
                seed);
          }};
}

std::vector<Leaf> param_leaves(const nn::ParamList& params) {
  std::vector<Leaf> out;
  for (nn::Parameter* p : params) out.push_back({p->name, &p->value});
  return out;
}

DeltaEncoderConfig small_config(std::uint64_t seed) {
  DeltaEncoderConfig c;
  c.height = 32;
  c.width = 32;
  c.d = 16;
  c.heads = 2;
  c.layers = 2;
  c.mlp_hidden = 16;
  c.k_tau = 2;
  c.k_delta = 2;
  c.seed = seed;
  return c;
}

PFrame random_pframe(const DeltaEncoderConfig& c, std::uint64_t seed) {
  Rng rng(hash_combine(seed, 0x7066ULL));
  PFrame p;
  p.motion = MotionField(c.height / 8, c.width / 8, 8);
  for (int r = 0; r < p.motion.grid_rows(); ++r)
    for (int col = 0; col < p.motion.grid_cols(); ++col)
      p.motion.at(r, col) = {rng.uniform_int(-6, 6), rng.uniform_int(-6, 6)};
  p.residual = ResidualPlane(c.height, c.width, c.channels);
  for (auto& v : p.residual.values()) v = static_cast<std::int16_t>(rng.uniform_int(-80, 80));
  return p;
}

nn::ParamList with_prefix(const nn::ParamList& params, const std::string& prefix) {
  nn::ParamList out;
  for (nn::Parameter* p : params)
    if (p->name.rfind(prefix, 0) == 0) out.push_back(p);
  return out;
}

constexpr std::size_t kModelProbes = 4;

}  // namespace

std::vector<GradCase> gradient_cases() {
  std::vector<GradCase> cases;
  cases.push_back(tensor_case("matmul", {{3, 4}, {4, 5}}, [](Graph&, const auto& v) { return nn::matmul(v[0], v[1]); }));
  cases.push_back(
      tensor_case("matmul_nt", {{3, 4}, {5, 4}}, [](Graph&, const auto& v) { return nn::matmul_nt(v[0], v[1]); }));
  cases.push_back(tensor_case("add", {{3, 4}, {3, 4}}, [](Graph&, const auto& v) { return nn::add(v[0], v[1]); }));
  cases.push_back(
      tensor_case("add_bias", {{3, 4}, {4}}, [](Graph&, const auto& v) { return nn::add_bias(v[0], v[1]); }));
  cases.push_back(tensor_case("scale", {{3, 4}}, [](Graph&, const auto& v) { return nn::scale(v[0], -0.7); }));
  cases.push_back(tensor_case("relu", {{4, 5}}, [](Graph&, const auto& v) { return nn::relu(v[0]); }, true));
  cases.push_back(tensor_case("gelu", {{4, 5}}, [](Graph&, const auto& v) { return nn::gelu(v[0]); }));
  cases.push_back(tensor_case("tanh", {{4, 5}}, [](Graph&, const auto& v) { return nn::tanh(v[0]); }));
  cases.push_back(tensor_case("softmax_rows", {{3, 5}}, [](Graph&, const auto& v) { return nn::softmax_rows(v[0]); }));
  cases.push_back(tensor_case("layer_norm", {{3, 6}, {6}, {6}},
                              [](Graph&, const auto& v) { return nn::layer_norm(v[0], v[1], v[2]); }));
  cases.push_back(
      tensor_case("slice_rows", {{5, 4}}, [](Graph&, const auto& v) { return nn::slice_rows(v[0], 1, 4); }));
  cases.push_back(
      tensor_case("slice_cols", {{3, 6}}, [](Graph&, const auto& v) { return nn::slice_cols(v[0], 2, 5); }));
  cases.push_back(tensor_case("concat_rows", {{2, 3}, {4, 3}},
                              [](Graph&, const auto& v) { return nn::concat_rows({v[0], v[1]}); }));
  cases.push_back(tensor_case("concat_cols", {{3, 2}, {3, 4}},
                              [](Graph&, const auto& v) { return nn::concat_cols({v[0], v[1]}); }));
  cases.push_back(
      tensor_case("reshape", {{2, 3, 4}}, [](Graph&, const auto& v) { return nn::reshape(v[0], {6, 4}); }));
  cases.push_back(tensor_case("conv2d_stride2", {{6, 8, 2}, {3, 3, 2, 3}, {3}},
                              [](Graph&, const auto& v) { return nn::conv2d_stride2(v[0], v[1], v[2]); }));
  cases.push_back(tensor_case("mean_rows", {{4, 5}}, [](Graph&, const auto& v) { return nn::mean_rows(v[0]); }));
  cases.push_back(
      tensor_case("row_mse", {{4, 6}, {4, 6}}, [](Graph&, const auto& v) { return nn::row_mse(v[0], v[1]); }));
  cases.push_back(tensor_case("mean_scalars", {{2, 3}, {2, 3}, {3, 2}, {3, 2}}, [](Graph&, const auto& v) {
    return nn::mean_scalars({nn::row_mse(v[0], v[1]), nn::row_mse(v[2], v[3])});
  }));

  cases.push_back({"linear", [](std::uint64_t seed) {
                     Rng rng(seed);
                     nn::Linear fc("fc", 5, 3, seed);
                     Tensor x = random_tensor({4, 5}, rng);
                     nn::ParamList ps;
                     fc.collect(ps);
                     auto leaves = param_leaves(ps);
                     leaves.insert(leaves.begin(), {"x", &x});
                     return check_gradients(leaves,
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              vars.push_back(g.input(x));
                                              for (auto* p : ps) vars.push_back(g.param(*p));
                                              return fc.forward(g, vars[0]);
                                            },
                                            seed);
                   }});
  cases.push_back({"attention", [](std::uint64_t seed) {
                     Rng rng(seed);
                     nn::MultiHeadAttention attn("attn", 8, 2, seed);
                     Tensor x = random_tensor({4, 8}, rng);
                     nn::ParamList ps;
                     attn.collect(ps);
                     auto leaves = param_leaves(ps);
                     leaves.insert(leaves.begin(), {"x", &x});
                     return check_gradients(leaves,
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              vars.push_back(g.input(x));
                                              for (auto* p : ps) vars.push_back(g.param(*p));
                                              return attn.forward(g, vars[0]);
                                            },
                                            seed);
                   }});
  cases.push_back({"prenorm_block", [](std::uint64_t seed) {
                     Rng rng(seed);
                     nn::PreNormBlock block("block", 8, 2, 16, seed);
                     Tensor x = random_tensor({3, 8}, rng);
                     nn::ParamList ps;
                     block.collect(ps);
                     auto leaves = param_leaves(ps);
                     leaves.insert(leaves.begin(), {"x", &x});
                     return check_gradients(leaves,
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              vars.push_back(g.input(x));
                                              for (auto* p : ps) vars.push_back(g.param(*p));
                                              return block.forward(g, vars[0]);
                                            },
                                            seed);
                   }});
  cases.push_back({"encode_motion", [](std::uint64_t seed) {
                     const DeltaEncoderConfig c = small_config(seed);
                     DeltaEncoderModel model(c);
                     const PFrame p = random_pframe(c, seed);
                     const nn::ParamList ps = with_prefix(model.parameters(), "motion");
                     return check_gradients(param_leaves(ps),
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              for (auto* q : ps) vars.push_back(g.param(*q));
                                              return model.encode_motion(g, p.motion);
                                            },
                                            seed, {1e-5, kModelProbes});
                   }});
  cases.push_back({"encode_residual", [](std::uint64_t seed) {
                     const DeltaEncoderConfig c = small_config(seed);
                     DeltaEncoderModel model(c);
                     const PFrame p = random_pframe(c, seed);
                     const nn::ParamList ps = with_prefix(model.parameters(), "residual");
                     return check_gradients(param_leaves(ps),
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              for (auto* q : ps) vars.push_back(g.param(*q));
                                              return model.encode_residual(g, p.residual);
                                            },
                                            seed, {1e-5, kModelProbes});
                   }});
  cases.push_back({"pretrain_forward", [](std::uint64_t seed) {
                     const DeltaEncoderConfig c = small_config(seed);
                     DeltaEncoderModel model(c);
                     PretrainHeads heads(c, HeadInit::Random);
                     const PFrame p = random_pframe(c, seed);
                     Rng rng(hash_combine(seed, 0x7074ULL));
                     Tensor prev = random_tensor({c.m(), c.d}, rng, 0.5);
                     const Tensor target = random_tensor({c.m(), c.d}, rng, 0.5);
                     nn::ParamList ps = model.parameters();
                     const nn::ParamList hp = heads.parameters();
                     ps.insert(ps.end(), hp.begin(), hp.end());
                     auto leaves = param_leaves(ps);
                     leaves.insert(leaves.begin(), {"prev_tokens", &prev});
                     return check_gradients(leaves,
                                            [&](Graph& g, std::vector<Var>& vars) {
                                              vars.push_back(g.input(prev));
                                              for (auto* q : ps) vars.push_back(g.param(*q));
                                              const Var pred = pretrain_forward(g, vars[0], p, model, heads);
                                              return alignment_loss(pred, g.input(target));
                                            },
                                            seed, {1e-5, kModelProbes});
                   }});
  return cases;
}

}  // namespace codectok::testing
