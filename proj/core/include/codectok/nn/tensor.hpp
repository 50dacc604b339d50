// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace codectok::nn {

/// Raised by any op whose output contains NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on shape mismatches between op operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major f64 array.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor matrix(int rows, int cols, double fill = 0.0) { return Tensor({rows, cols}, fill); }
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_, 0.0); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const { return data_.size(); }

  /// Matrix view: rank-1 tensors are a single row; higher ranks fold every
  /// trailing axis into the column count.
  int rows() const { return shape_.size() < 2 ? 1 : shape_[0]; }
  int cols() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols() + c]; }

  bool all_finite() const;
  void fill(double v);
  Tensor reshaped(std::vector<int> shape) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<int>& shape);
std::size_t shape_size(const std::vector<int>& shape);

/// Pairwise (tree) summation; the association order depends only on the
/// length, never on threading.
double pairwise_sum(std::span<const double> values);

struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value, bool trainable = true)
      : name(std::move(name)), value(std::move(value)), grad(Tensor::zeros_like(this->value)),
        trainable(trainable) {}

  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  void zero_grad() { grad.fill(0.0); }
};

/// Fills with uniform(-bound, bound) from a stream keyed by `seed`.
void init_uniform(Tensor& t, std::uint64_t seed, double bound);
void init_normal(Tensor& t, std::uint64_t seed, double stddev);

}  // namespace codectok::nn
