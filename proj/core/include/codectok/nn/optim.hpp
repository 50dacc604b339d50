// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "codectok/nn/layers.hpp"

namespace codectok::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled (AdamW) decay, applied as p -= lr * weight_decay * p.
  double weight_decay = 0.0;
};

/// Linear warmup to the base rate over `warmup_steps`, then cosine decay to
/// zero at `total_steps`. Steps are 1-based.
struct CosineSchedule {
  double base_lr = 3e-4;
  int warmup_steps = 1000;
  int total_steps = 100000;

  double at(int step) const;
};

/// Bias-corrected Adam with decoupled weight decay. Holds first and second
/// moments for a fixed parameter list; frozen parameters are skipped.
class Adam {
 public:
  Adam(ParamList params, AdamConfig config);

  /// One update using Parameter::grad and the given learning rate.
  void step(double lr);
  void step() { step(config_.lr); }
  void zero_grad();
  int steps_taken() const { return step_; }

 private:
  ParamList params_;
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  int step_ = 0;
};

}  // namespace codectok::nn
