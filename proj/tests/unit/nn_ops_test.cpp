// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "codectok/nn/graph.hpp"
#include "codectok/rng.hpp"

namespace codectok::nn {
namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed, double sd = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data()) v = rng.normal(0.0, sd);
  return t;
}

void expect_near(const Tensor& a, const Tensor& b, double tol) {
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

TEST(TensorTest, ShapeAndFill) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2);
  EXPECT_EQ(t.cols(), 3);
  EXPECT_EQ(t.at(1, 2), 1.5);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(t.reshaped({4, 2}), ShapeError);
}

TEST(PairwiseSumTest, BeatsNaiveAccumulation) {
  std::vector<double> values(1 << 20, 0.1);
  long double exact = 0.0L;
  for (double v : values) exact += static_cast<long double>(v);
  EXPECT_NEAR(pairwise_sum(values), static_cast<double>(exact), 1e-9);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(MatmulTest, MatchesTripleLoop) {
  Graph g;
  const Tensor a = random_tensor({3, 4}, 1), b = random_tensor({4, 5}, 2);
  const Tensor c = matmul(g.input(a), g.input(b)).value();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(c.at(i, j), s, 1e-12);
    }
  EXPECT_THROW(matmul(g.input(a), g.input(a)), ShapeError);
}

TEST(MatmulTest, TransposedVariantAgrees) {
  Graph g;
  const Tensor a = random_tensor({3, 4}, 3), b = random_tensor({5, 4}, 4);
  Tensor bt({4, 5});
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 4; ++k) bt.at(k, i) = b.at(i, k);
  const Tensor nt = matmul_nt(g.input(a), g.input(b)).value();
  expect_near(nt, matmul(g.input(a), g.input(bt)).value(), 1e-12);
}

TEST(SoftmaxTest, RowsSumToOneAndSurviveLargeLogits) {
  Graph g;
  Tensor x({2, 3}, std::vector<double>{1000.0, 1001.0, 1002.0, -5.0, 0.0, 5.0});
  const Tensor s = softmax_rows(g.input(x)).value();
  for (int r = 0; r < 2; ++r) EXPECT_NEAR(s.at(r, 0) + s.at(r, 1) + s.at(r, 2), 1.0, 1e-12);
  EXPECT_NEAR(s.at(0, 2) / s.at(0, 1), std::exp(1.0), 1e-9);
}

TEST(ActivationTest, PointValues) {
  Graph g;
  Tensor x({1, 3}, std::vector<double>{-1.0, 0.0, 2.0});
  const Tensor r = relu(g.input(x)).value();
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[2], 2.0);
  const Tensor ge = gelu(g.input(x)).value();
  const auto ref = [](double v) {
    return 0.5 * v * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (v + 0.044715 * v * v * v)));
  };
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(ge[static_cast<std::size_t>(i)], ref(x[static_cast<std::size_t>(i)]), 1e-15);
  EXPECT_NEAR(tanh(g.input(x)).value()[2], std::tanh(2.0), 1e-15);
}

TEST(LayerNormTest, ShiftInvariant) {
  Graph g;
  const Tensor x = random_tensor({4, 8}, 5);
  Tensor shifted = x;
  for (auto& v : shifted.data()) v += 37.0;
  const Tensor gamma({8}, 1.0), beta({8}, 0.0);
  const Tensor a = layer_norm(g.input(x), g.input(gamma), g.input(beta)).value();
  const Tensor b = layer_norm(g.input(shifted), g.input(gamma), g.input(beta)).value();
  expect_near(a, b, 1e-9);
  for (int r = 0; r < 4; ++r) {
    double mean = 0.0;
    for (int c = 0; c < 8; ++c) mean += a.at(r, c);
    EXPECT_NEAR(mean, 0.0, 1e-12);
  }
}

TEST(SliceConcatTest, ConcatThenSliceRoundTrips) {
  Graph g;
  const Tensor a = random_tensor({2, 3}, 6), b = random_tensor({4, 3}, 7);
  const Var cat = concat_rows({g.input(a), g.input(b)});
  EXPECT_EQ(cat.value().rows(), 6);
  EXPECT_EQ(slice_rows(cat, 2, 6).value(), b);
  const Tensor c = random_tensor({2, 5}, 8);
  const Var wide = concat_cols({g.input(a), g.input(c)});
  EXPECT_EQ(slice_cols(wide, 0, 3).value(), a);
  EXPECT_EQ(slice_cols(wide, 3, 8).value(), c);
  EXPECT_THROW(slice_rows(cat, 4, 7), ShapeError);
  EXPECT_THROW(concat_rows({g.input(a), g.input(c)}), ShapeError);
}

// Independent loop over the padded 3x3 neighbourhood.
Tensor conv_oracle(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int h = x.dim(0), wd = x.dim(1), cin = x.dim(2), cout = w.dim(3);
  Tensor out({h / 2, wd / 2, cout});
  for (int i = 0; i < h / 2; ++i)
    for (int j = 0; j < wd / 2; ++j)
      for (int o = 0; o < cout; ++o) {
        double s = b[static_cast<std::size_t>(o)];
        for (int ki = 0; ki < 3; ++ki)
          for (int kj = 0; kj < 3; ++kj) {
            const int r = 2 * i + ki - 1, c = 2 * j + kj - 1;
            if (r < 0 || r >= h || c < 0 || c >= wd) continue;
            for (int ci = 0; ci < cin; ++ci)
              s += x[(static_cast<std::size_t>(r) * wd + c) * cin + ci] *
                   w[((static_cast<std::size_t>(ki) * 3 + kj) * cin + ci) * cout + o];
          }
        out[(static_cast<std::size_t>(i) * (wd / 2) + j) * cout + o] = s;
      }
  return out;
}

TEST(ConvTest, DeltaKernelSubsamples) {
  Graph g;
  const Tensor x = random_tensor({6, 8, 1}, 9);
  Tensor w({3, 3, 1, 1});
  w[4] = 1.0;  // center tap
  const Tensor y = conv2d_stride2(g.input(x), g.input(w), g.input(Tensor({1}))).value();
  ASSERT_EQ(y.shape(), (std::vector<int>{3, 4, 1}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(y[static_cast<std::size_t>(i * 4 + j)], x[static_cast<std::size_t>((2 * i) * 8 + 2 * j)]);
}

TEST(ConvTest, AllOnesCountsValidTaps) {
  Graph g;
  const Tensor& y =
      conv2d_stride2(g.input(Tensor({4, 4, 1}, 1.0)), g.input(Tensor({3, 3, 1, 1}, 1.0)), g.input(Tensor({1}))).value();
  EXPECT_EQ(y[0], 4.0);
  EXPECT_EQ(y[3], 9.0);
}

TEST(ConvTest, MatchesOracleMultiChannel) {
  Graph g;
  const Tensor x = random_tensor({8, 6, 3}, 10), w = random_tensor({3, 3, 3, 4}, 11), b = random_tensor({4}, 12);
  expect_near(conv2d_stride2(g.input(x), g.input(w), g.input(b)).value(), conv_oracle(x, w, b), 1e-12);
}

TEST(ConvTest, OddSpatialDimsThrow) {
  Graph g;
  EXPECT_THROW(conv2d_stride2(g.input(Tensor({5, 4, 1})), g.input(Tensor({3, 3, 1, 1})), g.input(Tensor({1}))),
               ShapeError);
}

TEST(ReductionTest, MeanRowsAndRowMse) {
  Graph g;
  Tensor x({2, 2}, std::vector<double>{1.0, 2.0, 3.0, 6.0});
  EXPECT_EQ(mean_rows(g.input(x)).value(), Tensor({1, 2}, std::vector<double>{2.0, 4.0}));
  Tensor y({2, 2}, std::vector<double>{1.0, 0.0, 0.0, 6.0});
  // (4 + 9) / 2
  EXPECT_DOUBLE_EQ(row_mse(g.input(x), g.input(y)).value()[0], 6.5);
}

TEST(GraphTest, NonFiniteValueRaises) {
  Graph g;
  const Var x = g.input(Tensor({1}, 1e308));
  EXPECT_THROW(scale(x, 1e10), NumericError);
}

TEST(GraphTest, BackwardRequiresScalar) {
  Graph g;
  const Var x = g.input(Tensor({2}, 1.0));
  EXPECT_THROW(g.backward(x), ShapeError);
}

TEST(GraphTest, ParamGradientsAccumulate) {
  Parameter p("p", Tensor({1, 2}, std::vector<double>{1.0, 2.0}));
  for (int i = 0; i < 2; ++i) {
    Graph g;
    const Var v = g.param(p);
    const Var loss = weighted_sum(v, Tensor({1, 2}, std::vector<double>{3.0, -1.0}));
    g.backward(loss);
    g.accumulate_param_grads();
  }
  EXPECT_EQ(p.grad, Tensor({1, 2}, std::vector<double>{6.0, -2.0}));
}

}  // namespace
}  // namespace codectok::nn
