// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Token accounting, GOP sampling and interleaved token-stream assembly.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codectok/stream_model.hpp"

namespace codectok {

struct BudgetQuery {
  double duration_seconds = 0.0;
  int fps = 30;
  int gop_size = 240;
  int fusion_window = 30;
  int keyframes_per_gop = 1;
  std::int64_t m = 210;
  std::int64_t n = 8;
  std::int64_t context_budget = 1'000'000;
  std::int64_t per_frame_overhead = 0;

  int slots() const { return gop_size / fusion_window; }
  /// Throws ArgumentError naming the first violated invariant.
  void validate() const;
};

/// k*M + (slots-k)*N + slots*overhead.
std::int64_t tokens_per_gop(const BudgetQuery& q);

struct BudgetPlan {
  bool covered = false;  // false when the budget cannot hold a single GOP
  std::int64_t tokens_per_gop = 0;
  std::int64_t max_gops = 0;
  double max_duration_seconds = 0.0;
  std::int64_t tokens_used = 0;
  /// Tokens needed for q.duration_seconds (whole GOPs, rounded up); 0 when
  /// no duration was given.
  std::int64_t tokens_for_duration = 0;
};

BudgetPlan plan_budget(const BudgetQuery& q);

/// All indices when total <= cap, otherwise floor(j * total / cap) for
/// j = 0..cap-1.
std::vector<std::int64_t> sample_gops(std::int64_t total_gops, std::int64_t cap = 64);

/// One row of a token-budget vs coverage curve.
struct ScalingPoint {
  std::string config_label;
  std::int64_t context_budget = 0;
  double max_duration_seconds = 0.0;
};

struct ScalingConfig {
  std::string label;
  BudgetQuery query;
};

/// The dense 1 FPS baseline plus 1, 2 and 4 keyframes per GOP at 1 FPS.
std::vector<ScalingConfig> default_scaling_configs();

std::vector<ScalingPoint> scaling_curve(const std::vector<ScalingConfig>& configs,
                                        const std::vector<std::int64_t>& budgets);

/// Budgets from 16K to 1M tokens, doubling, with 1M as the last point.
std::vector<std::int64_t> default_scaling_budgets();

/// Maps an I-frame to rows x dim tokens.
class FrameTokenizer {
 public:
  virtual ~FrameTokenizer() = default;
  virtual int dim() const = 0;
  virtual int tokens_per_frame() const = 0;
  virtual std::vector<float> tokenize(const Frame& frame) const = 0;
};

/// Maps a P-frame to N x dim tokens.
class DeltaTokenizer {
 public:
  virtual ~DeltaTokenizer() = default;
  virtual int dim() const = 0;
  virtual int tokens_per_pframe() const = 0;
  virtual std::vector<float> tokenize(const PFrame& frame) const = 0;
};

/// Emits all-zero P-frame tokens of the wrapped tokenizer's shape.
class ZeroDeltaTokenizer final : public DeltaTokenizer {
 public:
  explicit ZeroDeltaTokenizer(const DeltaTokenizer& inner) : inner_(inner) {}
  int dim() const override { return inner_.dim(); }
  int tokens_per_pframe() const override { return inner_.tokens_per_pframe(); }
  std::vector<float> tokenize(const PFrame&) const override {
    return std::vector<float>(static_cast<std::size_t>(dim()) * tokens_per_pframe(), 0.0f);
  }

 private:
  const DeltaTokenizer& inner_;
};

/// Interleaves I and P tokens in display order for the sampled GOPs. Entries
/// carry pre-fusion frame indices.
TokenStream build_token_stream(const CodecStream& stream, const FrameTokenizer& embedder,
                               const DeltaTokenizer& delta_encoder,
                               const std::vector<std::int64_t>& sampled_gops, int threads = 1);

/// Per-GOP token and residual-energy summary of a stream.
struct GopStats {
  std::int64_t gop = 0;
  int iframes = 0;
  int pframes = 0;
  std::int64_t tokens = 0;
  std::int64_t residual_abs_sum = 0;
  int max_motion = 0;
};

std::vector<GopStats> gop_stats(const CodecStream& stream, std::int64_t m, std::int64_t n);

}  // namespace codectok
