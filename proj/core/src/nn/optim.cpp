// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace codectok::nn {

double CosineSchedule::at(int step) const {
  if (warmup_steps > 0 && step <= warmup_steps)
    return base_lr * static_cast<double>(step) / warmup_steps;
  const int decay_steps = std::max(1, total_steps - warmup_steps);
  const double progress =
      std::clamp(static_cast<double>(step - warmup_steps) / decay_steps, 0.0, 1.0);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * progress));
}

Adam::Adam(ParamList params, AdamConfig config) : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (Parameter* p : params_) {
    m_.push_back(Tensor::zeros_like(p->value));
    v_.push_back(Tensor::zeros_like(p->value));
  }
}

void Adam::step(double lr) {
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, step_);
  const double bc2 = 1.0 - std::pow(config_.beta2, step_);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    if (!p.trainable) continue;
    if (p.grad.shape() != p.value.shape())
      throw ShapeError("Adam: gradient shape differs for " + p.name);
    auto w = p.value.data();
    const auto g = p.grad.data();
    auto m = m_[k].data();
    auto v = v_[k].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      if (config_.weight_decay != 0.0) w[i] -= lr * config_.weight_decay * w[i];
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace codectok::nn
