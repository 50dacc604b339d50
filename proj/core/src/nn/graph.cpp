// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace codectok::nn {

namespace {

// C[L,N] (+)= A[L,K] * B[K,N]
void gemm_nn(const double* a, const double* b, double* c, int l, int k, int n, bool accumulate) {
  if (!accumulate) std::fill(c, c + static_cast<std::size_t>(l) * n, 0.0);
  for (int i = 0; i < l; ++i) {
    double* crow = c + static_cast<std::size_t>(i) * n;
    const double* arow = a + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[L,N] (+)= A[L,K] * B[N,K]^T
void gemm_nt(const double* a, const double* b, double* c, int l, int k, int n, bool accumulate) {
  for (int i = 0; i < l; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * k;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + s : s;
    }
  }
}

// C[K,N] (+)= A[L,K]^T * B[L,N]
void gemm_tn(const double* a, const double* b, double* c, int l, int k, int n, bool accumulate) {
  if (!accumulate) std::fill(c, c + static_cast<std::size_t>(k) * n, 0.0);
  for (int i = 0; i < l; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    const double* brow = b + static_cast<std::size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* crow = c + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

Graph& same_graph(Var a, Var b, const char* op) {
  if (a.graph == nullptr || a.graph != b.graph)
    throw ShapeError(std::string(op) + ": operands live on different graphs");
  return *a.graph;
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
}

constexpr double kGeluC = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

}  // namespace

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::input(Tensor value) {
  nodes_.push_back({std::move(value), {}, {}, {}, nullptr});
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Graph::param(Parameter& p) {
  for (const auto& [bound, id] : bound_)
    if (bound == &p) return {this, id};
  nodes_.push_back({p.value, {}, {}, {}, &p});
  const int id = static_cast<int>(nodes_.size() - 1);
  bound_.emplace_back(&p, id);
  return {this, id};
}

Var Graph::record(Tensor value, std::vector<int> inputs, Backward backward) {
  if (!value.all_finite()) throw NumericError("non-finite value produced by an op");
  nodes_.push_back({std::move(value), {}, std::move(inputs), std::move(backward), nullptr});
  return {this, static_cast<int>(nodes_.size() - 1)};
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw ShapeError("backward: loss belongs to another graph");
  if (value(loss.id).size() != 1) throw ShapeError("backward: loss must have a single element");
  for (auto& n : nodes_) n.grad = Tensor::zeros_like(n.value);
  nodes_[static_cast<std::size_t>(loss.id)].grad[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backward) n.backward(*this, id);
  }
}

std::vector<std::pair<Parameter*, const Tensor*>> Graph::param_grads() const {
  std::vector<std::pair<Parameter*, const Tensor*>> out;
  out.reserve(bound_.size());
  for (const auto& [p, id] : bound_) out.emplace_back(p, &nodes_[static_cast<std::size_t>(id)].grad);
  return out;
}

void Graph::accumulate_param_grads() const {
  for (const auto& [p, g] : param_grads()) {
    if (!p->trainable || g->size() == 0) continue;
    auto dst = p->grad.data();
    const auto src = g->data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

Var matmul(Var a, Var b) {
  Graph& g = same_graph(a, b, "matmul");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  const int l = av.dim(0), k = av.dim(1), n = bv.dim(1);
  if (bv.dim(0) != k)
    throw ShapeError("matmul: " + shape_string(av.shape()) + " x " + shape_string(bv.shape()));
  Tensor out = Tensor::matrix(l, n);
  gemm_nn(av.data().data(), bv.data().data(), out.data().data(), l, k, n, false);
  return g.record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id, l, k, n](Graph& gr, int self) {
    const double* dc = gr.grad(self).data().data();
    gemm_nt(dc, gr.value(bi).data().data(), gr.grad_mut(ai).data().data(), l, n, k, true);
    gemm_tn(gr.value(ai).data().data(), dc, gr.grad_mut(bi).data().data(), l, k, n, true);
  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = same_graph(a, b, "matmul_nt");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_matrix(av, "matmul_nt");
  require_matrix(bv, "matmul_nt");
  const int l = av.dim(0), k = av.dim(1), n = bv.dim(0);
  if (bv.dim(1) != k)
    throw ShapeError("matmul_nt: " + shape_string(av.shape()) + " x " + shape_string(bv.shape()) + "^T");
  Tensor out = Tensor::matrix(l, n);
  gemm_nt(av.data().data(), bv.data().data(), out.data().data(), l, k, n, false);
  return g.record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id, l, k, n](Graph& gr, int self) {
    const double* dc = gr.grad(self).data().data();
    gemm_nn(dc, gr.value(bi).data().data(), gr.grad_mut(ai).data().data(), l, n, k, true);
    gemm_tn(dc, gr.value(ai).data().data(), gr.grad_mut(bi).data().data(), l, n, k, true);
  });
}

Var add(Var a, Var b) {
  Graph& g = same_graph(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  const auto bd = b.value().data();
  auto od = out.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] += bd[i];
  return g.record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto da = gr.grad_mut(ai).data();
    for (std::size_t i = 0; i < dc.size(); ++i) da[i] += dc[i];
    auto db = gr.grad_mut(bi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) db[i] += dc[i];
  });
}

Var add_bias(Var x, Var bias) {
  Graph& g = same_graph(x, bias, "add_bias");
  const Tensor& xv = x.value();
  const int cols = xv.cols();
  const int rows = static_cast<int>(xv.size()) / std::max(cols, 1);
  if (static_cast<int>(bias.value().size()) != cols)
    throw ShapeError("add_bias: bias " + shape_string(bias.shape()) + " vs input " + shape_string(xv.shape()));
  Tensor out = xv;
  const auto bd = bias.value().data();
  auto od = out.data();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) od[static_cast<std::size_t>(r) * cols + c] += bd[c];
  return g.record(std::move(out), {x.id, bias.id}, [xi = x.id, bi = bias.id, rows, cols](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i];
    auto db = gr.grad_mut(bi).data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) db[c] += dc[static_cast<std::size_t>(r) * cols + c];
  });
}

Var scale(Var x, double s) {
  Tensor out = x.value();
  for (double& v : out.data()) v *= s;
  return x.graph->record(std::move(out), {x.id}, [xi = x.id, s](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += s * dc[i];
  });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return x.graph->record(std::move(out), {x.id}, [xi = x.id](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    const auto xv = gr.value(xi).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i)
      if (xv[i] > 0.0) dx[i] += dc[i];
  });
}

Var gelu(Var x) {
  Tensor out = x.value();
  for (double& v : out.data()) {
    const double u = kSqrt2OverPi * (v + kGeluC * v * v * v);
    v = 0.5 * v * (1.0 + std::tanh(u));
  }
  return x.graph->record(std::move(out), {x.id}, [xi = x.id](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    const auto xv = gr.value(xi).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) {
      const double v = xv[i];
      const double t = std::tanh(kSqrt2OverPi * (v + kGeluC * v * v * v));
      const double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluC * v * v);
      dx[i] += dc[i] * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du);
    }
  });
}

Var tanh(Var x) {
  Tensor out = x.value();
  for (double& v : out.data()) v = std::tanh(v);
  return x.graph->record(std::move(out), {x.id}, [xi = x.id](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    const auto y = gr.value(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i] * (1.0 - y[i] * y[i]);
  });
}

Var softmax_rows(Var x) {
  const Tensor& xv = x.value();
  require_matrix(xv, "softmax_rows");
  const int rows = xv.dim(0), cols = xv.dim(1);
  Tensor out = xv;
  for (int r = 0; r < rows; ++r) {
    double* row = out.data().data() + static_cast<std::size_t>(r) * cols;
    const double mx = *std::max_element(row, row + cols);
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (int c = 0; c < cols; ++c) row[c] /= sum;
  }
  return x.graph->record(std::move(out), {x.id}, [xi = x.id, rows, cols](Graph& gr, int self) {
    const double* dc = gr.grad(self).data().data();
    const double* y = gr.value(self).data().data();
    double* dx = gr.grad_mut(xi).data().data();
    for (int r = 0; r < rows; ++r) {
      const std::size_t o = static_cast<std::size_t>(r) * cols;
      double dot = 0.0;
      for (int c = 0; c < cols; ++c) dot += dc[o + c] * y[o + c];
      for (int c = 0; c < cols; ++c) dx[o + c] += y[o + c] * (dc[o + c] - dot);
    }
  });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  Graph& g = same_graph(x, gamma, "layer_norm");
  same_graph(x, beta, "layer_norm");
  const Tensor& xv = x.value();
  require_matrix(xv, "layer_norm");
  const int rows = xv.dim(0), cols = xv.dim(1);
  if (static_cast<int>(gamma.value().size()) != cols || static_cast<int>(beta.value().size()) != cols)
    throw ShapeError("layer_norm: affine params do not match width " + std::to_string(cols));

  Tensor out = Tensor::matrix(rows, cols);
  std::vector<double> xhat(xv.size());
  std::vector<double> rstd(static_cast<std::size_t>(rows));
  const auto gd = gamma.value().data();
  const auto bd = beta.value().data();
  for (int r = 0; r < rows; ++r) {
    const std::size_t o = static_cast<std::size_t>(r) * cols;
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) mean += xv[o + c];
    mean /= cols;
    double var = 0.0;
    for (int c = 0; c < cols; ++c) var += (xv[o + c] - mean) * (xv[o + c] - mean);
    var /= cols;
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[static_cast<std::size_t>(r)] = rs;
    for (int c = 0; c < cols; ++c) {
      xhat[o + c] = (xv[o + c] - mean) * rs;
      out[o + c] = gd[c] * xhat[o + c] + bd[c];
    }
  }
  return g.record(std::move(out), {x.id, gamma.id, beta.id},
                  [xi = x.id, gi = gamma.id, bi = beta.id, rows, cols, xhat = std::move(xhat),
                   rstd = std::move(rstd)](Graph& gr, int self) {
                    const auto dy = gr.grad(self).data();
                    const auto gd = gr.value(gi).data();
                    auto dx = gr.grad_mut(xi).data();
                    auto dg = gr.grad_mut(gi).data();
                    auto db = gr.grad_mut(bi).data();
                    std::vector<double> dxhat(static_cast<std::size_t>(cols));
                    for (int r = 0; r < rows; ++r) {
                      const std::size_t o = static_cast<std::size_t>(r) * cols;
                      double mean_d = 0.0, mean_dx = 0.0;
                      for (int c = 0; c < cols; ++c) {
                        dg[c] += dy[o + c] * xhat[o + c];
                        db[c] += dy[o + c];
                        dxhat[c] = dy[o + c] * gd[c];
                        mean_d += dxhat[c];
                        mean_dx += dxhat[c] * xhat[o + c];
                      }
                      mean_d /= cols;
                      mean_dx /= cols;
                      const double rs = rstd[static_cast<std::size_t>(r)];
                      for (int c = 0; c < cols; ++c)
                        dx[o + c] += rs * (dxhat[c] - mean_d - xhat[o + c] * mean_dx);
                    }
                  });
}

Var slice_rows(Var x, int begin, int end) {
  const Tensor& xv = x.value();
  require_matrix(xv, "slice_rows");
  if (begin < 0 || end > xv.dim(0) || begin >= end)
    throw ShapeError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") of " + shape_string(xv.shape()));
  const int cols = xv.dim(1);
  const auto offset = static_cast<std::size_t>(begin) * cols;
  const auto count = static_cast<std::size_t>(end - begin) * cols;
  std::vector<double> data(xv.data().begin() + static_cast<std::ptrdiff_t>(offset),
                           xv.data().begin() + static_cast<std::ptrdiff_t>(offset + count));
  return x.graph->record(Tensor({end - begin, cols}, std::move(data)), {x.id},
                         [xi = x.id, offset, count](Graph& gr, int self) {
                           const auto dc = gr.grad(self).data();
                           auto dx = gr.grad_mut(xi).data();
                           for (std::size_t i = 0; i < count; ++i) dx[offset + i] += dc[i];
                         });
}

Var slice_cols(Var x, int begin, int end) {
  const Tensor& xv = x.value();
  require_matrix(xv, "slice_cols");
  const int rows = xv.dim(0), cols = xv.dim(1);
  if (begin < 0 || end > cols || begin >= end)
    throw ShapeError("slice_cols: [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") of " + shape_string(xv.shape()));
  const int width = end - begin;
  Tensor out = Tensor::matrix(rows, width);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < width; ++c) out.at(r, c) = xv.at(r, begin + c);
  return x.graph->record(std::move(out), {x.id}, [xi = x.id, rows, cols, begin, width](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < width; ++c)
        dx[static_cast<std::size_t>(r) * cols + begin + c] += dc[static_cast<std::size_t>(r) * width + c];
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Graph& g = *parts.front().graph;
  const int cols = parts.front().value().cols();
  int rows = 0;
  std::vector<int> ids;
  for (const Var& p : parts) {
    same_graph(parts.front(), p, "concat_rows");
    require_matrix(p.value(), "concat_rows");
    if (p.value().dim(1) != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.value().dim(0);
    ids.push_back(p.id);
  }
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(rows) * cols);
  for (const Var& p : parts) data.insert(data.end(), p.value().data().begin(), p.value().data().end());
  return g.record(Tensor({rows, cols}, std::move(data)), ids, [ids](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    std::size_t offset = 0;
    for (int id : ids) {
      auto dx = gr.grad_mut(id).data();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dc[offset + i];
      offset += dx.size();
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Graph& g = *parts.front().graph;
  const int rows = parts.front().value().rows();
  int cols = 0;
  std::vector<int> ids, widths;
  for (const Var& p : parts) {
    same_graph(parts.front(), p, "concat_cols");
    require_matrix(p.value(), "concat_cols");
    if (p.value().dim(0) != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.value().dim(1);
    ids.push_back(p.id);
    widths.push_back(p.value().dim(1));
  }
  Tensor out = Tensor::matrix(rows, cols);
  int c0 = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < pv.dim(1); ++c) out.at(r, c0 + c) = pv.at(r, c);
    c0 += pv.dim(1);
  }
  return g.record(std::move(out), ids, [ids, widths, rows, cols](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    int c0 = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto dx = gr.grad_mut(ids[k]).data();
      const int w = widths[k];
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < w; ++c)
          dx[static_cast<std::size_t>(r) * w + c] += dc[static_cast<std::size_t>(r) * cols + c0 + c];
      c0 += w;
    }
  });
}

Var reshape(Var x, std::vector<int> shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return x.graph->record(std::move(out), {x.id}, [xi = x.id](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i];
  });
}

Var conv2d_stride2(Var x, Var w, Var b) {
  Graph& g = same_graph(x, w, "conv2d_stride2");
  same_graph(x, b, "conv2d_stride2");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  if (xv.rank() != 3) throw ShapeError("conv2d_stride2: input must be [H,W,C], got " + shape_string(xv.shape()));
  const int h = xv.dim(0), wd = xv.dim(1), cin = xv.dim(2);
  if (h % 2 != 0 || wd % 2 != 0)
    throw ShapeError("conv2d_stride2: spatial dims must be even, got " + shape_string(xv.shape()));
  if (wv.rank() != 4 || wv.dim(0) != 3 || wv.dim(1) != 3 || wv.dim(2) != cin)
    throw ShapeError("conv2d_stride2: kernel " + shape_string(wv.shape()) + " for input " +
                     shape_string(xv.shape()));
  const int cout = wv.dim(3);
  if (static_cast<int>(b.value().size()) != cout) throw ShapeError("conv2d_stride2: bias size mismatch");
  const int ho = h / 2, wo = wd / 2;
  const int patch = 9 * cin;
  const int positions = ho * wo;

  // im2col: row = output position, column = (ky, kx, ci).
  std::vector<double> col(static_cast<std::size_t>(positions) * patch, 0.0);
  for (int oy = 0; oy < ho; ++oy)
    for (int ox = 0; ox < wo; ++ox) {
      double* row = col.data() + static_cast<std::size_t>(oy * wo + ox) * patch;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = 2 * oy + ky - 1;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const int ix = 2 * ox + kx - 1;
          if (ix < 0 || ix >= wd) continue;
          const double* src = xv.data().data() + (static_cast<std::size_t>(iy) * wd + ix) * cin;
          std::copy(src, src + cin, row + (ky * 3 + kx) * cin);
        }
      }
    }
  Tensor out({ho, wo, cout});
  gemm_nn(col.data(), wv.data().data(), out.data().data(), positions, patch, cout, false);
  const auto bd = b.value().data();
  for (int p = 0; p < positions; ++p)
    for (int c = 0; c < cout; ++c) out[static_cast<std::size_t>(p) * cout + c] += bd[c];

  return g.record(std::move(out), {x.id, w.id, b.id},
                  [xi = x.id, wi = w.id, bi = b.id, col = std::move(col), h, wd, cin, ho, wo, cout, patch,
                   positions](Graph& gr, int self) {
                    const double* dout = gr.grad(self).data().data();
                    gemm_tn(col.data(), dout, gr.grad_mut(wi).data().data(), positions, patch, cout, true);
                    auto db = gr.grad_mut(bi).data();
                    for (int p = 0; p < positions; ++p)
                      for (int c = 0; c < cout; ++c) db[c] += dout[static_cast<std::size_t>(p) * cout + c];
                    std::vector<double> dcol(static_cast<std::size_t>(positions) * patch);
                    gemm_nt(dout, gr.value(wi).data().data(), dcol.data(), positions, cout, patch, false);
                    double* dx = gr.grad_mut(xi).data().data();
                    for (int oy = 0; oy < ho; ++oy)
                      for (int ox = 0; ox < wo; ++ox) {
                        const double* row = dcol.data() + static_cast<std::size_t>(oy * wo + ox) * patch;
                        for (int ky = 0; ky < 3; ++ky) {
                          const int iy = 2 * oy + ky - 1;
                          if (iy < 0 || iy >= h) continue;
                          for (int kx = 0; kx < 3; ++kx) {
                            const int ix = 2 * ox + kx - 1;
                            if (ix < 0 || ix >= wd) continue;
                            double* dst = dx + (static_cast<std::size_t>(iy) * wd + ix) * cin;
                            const double* src = row + (ky * 3 + kx) * cin;
                            for (int c = 0; c < cin; ++c) dst[c] += src[c];
                          }
                        }
                      }
                  });
}

Var mean_rows(Var x) {
  const Tensor& xv = x.value();
  require_matrix(xv, "mean_rows");
  const int rows = xv.dim(0), cols = xv.dim(1);
  Tensor out = Tensor::matrix(1, cols);
  std::vector<double> column(static_cast<std::size_t>(rows));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) column[static_cast<std::size_t>(r)] = xv.at(r, c);
    out[static_cast<std::size_t>(c)] = pairwise_sum(column) / rows;
  }
  return x.graph->record(std::move(out), {x.id}, [xi = x.id, rows, cols](Graph& gr, int self) {
    const auto dc = gr.grad(self).data();
    auto dx = gr.grad_mut(xi).data();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) dx[static_cast<std::size_t>(r) * cols + c] += dc[c] / rows;
  });
}

Var row_mse(Var pred, Var target) {
  Graph& g = same_graph(pred, target, "row_mse");
  require_same_shape(pred.value(), target.value(), "row_mse");
  const Tensor& p = pred.value();
  const Tensor& t = target.value();
  const int rows = p.rows();
  std::vector<double> sq(p.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (t[i] - p[i]) * (t[i] - p[i]);
  Tensor out({1}, pairwise_sum(sq) / rows);
  return g.record(std::move(out), {pred.id, target.id}, [pi = pred.id, ti = target.id, rows](Graph& gr, int self) {
    const double dc = gr.grad(self)[0];
    const auto pv = gr.value(pi).data();
    const auto tv = gr.value(ti).data();
    auto dp = gr.grad_mut(pi).data();
    auto dt = gr.grad_mut(ti).data();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double d = 2.0 * (tv[i] - pv[i]) / rows * dc;
      dp[i] -= d;
      dt[i] += d;
    }
  });
}

Var weighted_sum(Var x, const Tensor& weights) {
  require_same_shape(x.value(), weights, "weighted_sum");
  std::vector<double> prod(weights.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = x.value()[i] * weights[i];
  Tensor out({1}, pairwise_sum(prod));
  return x.graph->record(std::move(out), {x.id}, [xi = x.id, weights](Graph& gr, int self) {
    const double dc = gr.grad(self)[0];
    auto dx = gr.grad_mut(xi).data();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += weights[i] * dc;
  });
}

Var mean_scalars(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("mean_scalars: no inputs");
  std::vector<double> values;
  std::vector<int> ids;
  for (const Var& p : parts) {
    same_graph(parts.front(), p, "mean_scalars");
    if (p.value().size() != 1) throw ShapeError("mean_scalars: inputs must be single elements");
    values.push_back(p.value()[0]);
    ids.push_back(p.id);
  }
  const double n = static_cast<double>(parts.size());
  Tensor out({1}, pairwise_sum(values) / n);
  return parts.front().graph->record(std::move(out), ids, [ids, n](Graph& gr, int self) {
    const double dc = gr.grad(self)[0];
    for (int id : ids) gr.grad_mut(id)[0] += dc / n;
  });
}

}  // namespace codectok::nn
