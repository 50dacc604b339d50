// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/tokenizer_stream.hpp"

#include <algorithm>
#include <cmath>

#include "codectok/parallel.hpp"

namespace codectok {

void BudgetQuery::validate() const {
  auto fail = [](const std::string& what) { throw ArgumentError("BudgetQuery: " + what); };
  if (fps <= 0) fail("fps must be positive");
  if (gop_size <= 0) fail("gop_size must be positive");
  if (fusion_window <= 0) fail("fusion_window must be positive");
  if (gop_size % fusion_window != 0) fail("gop_size must be a multiple of fusion_window");
  if (keyframes_per_gop <= 0) fail("keyframes_per_gop must be positive");
  if (keyframes_per_gop > slots()) fail("keyframes_per_gop exceeds gop_size / fusion_window");
  if (m <= 0 || n <= 0) fail("M and N must be positive");
  if (m <= n) fail("M must exceed N");
  if (context_budget < 0) fail("context_budget must be non-negative");
  if (per_frame_overhead < 0) fail("per_frame_overhead must be non-negative");
  if (duration_seconds < 0.0) fail("duration must be non-negative");
}

std::int64_t tokens_per_gop(const BudgetQuery& q) {
  q.validate();
  const std::int64_t slots = q.slots();
  const std::int64_t k = q.keyframes_per_gop;
  return k * q.m + (slots - k) * q.n + slots * q.per_frame_overhead;
}

BudgetPlan plan_budget(const BudgetQuery& q) {
  BudgetPlan plan;
  plan.tokens_per_gop = tokens_per_gop(q);
  if (q.duration_seconds > 0.0) {
    const double gop_seconds = static_cast<double>(q.gop_size) / q.fps;
    const auto gops = static_cast<std::int64_t>(std::ceil(q.duration_seconds / gop_seconds - 1e-9));
    plan.tokens_for_duration = gops * plan.tokens_per_gop;
  }
  if (q.context_budget < plan.tokens_per_gop) return plan;
  plan.covered = true;
  plan.max_gops = q.context_budget / plan.tokens_per_gop;
  plan.tokens_used = plan.max_gops * plan.tokens_per_gop;
  plan.max_duration_seconds = static_cast<double>(plan.max_gops) * q.gop_size / q.fps;
  return plan;
}

std::vector<std::int64_t> sample_gops(std::int64_t total_gops, std::int64_t cap) {
  if (total_gops < 1) throw ArgumentError("sample_gops: total_gops must be at least 1");
  if (cap < 1) throw ArgumentError("sample_gops: cap must be at least 1");
  std::vector<std::int64_t> out;
  if (total_gops <= cap) {
    out.resize(static_cast<std::size_t>(total_gops));
    for (std::int64_t i = 0; i < total_gops; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  out.reserve(static_cast<std::size_t>(cap));
  for (std::int64_t j = 0; j < cap; ++j) out.push_back(j * total_gops / cap);
  return out;
}

std::vector<ScalingConfig> default_scaling_configs() {
  std::vector<ScalingConfig> configs;
  auto add = [&](std::string label, int keyframes) {
    BudgetQuery q;
    q.keyframes_per_gop = keyframes;
    configs.push_back({std::move(label), q});
  };
  add("dense_rgb_1fps", 8);
  add("delta_4key_4p", 4);
  add("delta_2key_6p", 2);
  add("delta_1key_7p", 1);
  return configs;
}

std::vector<std::int64_t> default_scaling_budgets() {
  std::vector<std::int64_t> budgets;
  for (std::int64_t b = 16'384; b < 1'000'000; b *= 2) budgets.push_back(b);
  budgets.push_back(1'000'000);
  return budgets;
}

std::vector<ScalingPoint> scaling_curve(const std::vector<ScalingConfig>& configs,
                                        const std::vector<std::int64_t>& budgets) {
  std::vector<ScalingPoint> points;
  points.reserve(configs.size() * budgets.size());
  for (const auto& c : configs) {
    for (std::int64_t budget : budgets) {
      BudgetQuery q = c.query;
      q.context_budget = budget;
      points.push_back({c.label, budget, plan_budget(q).max_duration_seconds});
    }
  }
  return points;
}

TokenStream build_token_stream(const CodecStream& stream, const FrameTokenizer& embedder,
                               const DeltaTokenizer& delta_encoder,
                               const std::vector<std::int64_t>& sampled_gops, int threads) {
  if (embedder.dim() != delta_encoder.dim())
    throw ConfigError("build_token_stream: embedder dim " + std::to_string(embedder.dim()) +
                      " != delta encoder dim " + std::to_string(delta_encoder.dim()));
  const ValidationReport report = validate_stream(stream);
  if (!report.ok()) throw ArgumentError("build_token_stream: invalid stream: " + report.to_string());

  std::vector<std::int64_t> gops = sampled_gops;
  std::sort(gops.begin(), gops.end());
  gops.erase(std::unique(gops.begin(), gops.end()), gops.end());

  std::vector<std::size_t> entries;
  for (std::int64_t g : gops) {
    if (g < 0 || static_cast<std::size_t>(g) >= stream.gop_count())
      throw ArgumentError("build_token_stream: GOP index " + std::to_string(g) + " out of range");
    const auto [first, last] = stream.gop_entries(static_cast<std::size_t>(g));
    for (std::size_t j = first; j < last; ++j) entries.push_back(j);
  }

  TokenStream out;
  out.entries.resize(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const std::size_t j = entries[i];
    const EncodedFrame& ef = stream.frames[j];
    TokenEntry& e = out.entries[i];
    e.frame_index = stream.timestamp(j);
    e.cols = embedder.dim();
    if (ef.is_iframe()) {
      e.role = TokenRole::I;
      e.rows = embedder.tokens_per_frame();
      e.tokens = embedder.tokenize(ef.iframe().image);
    } else {
      e.role = TokenRole::P;
      e.rows = delta_encoder.tokens_per_pframe();
      e.tokens = delta_encoder.tokenize(ef.pframe());
    }
  });
  return out;
}

std::vector<GopStats> gop_stats(const CodecStream& stream, std::int64_t m, std::int64_t n) {
  std::vector<GopStats> stats;
  for (std::size_t g = 0; g < stream.gop_count(); ++g) {
    GopStats s;
    s.gop = static_cast<std::int64_t>(g);
    const auto [first, last] = stream.gop_entries(g);
    for (std::size_t j = first; j < last; ++j) {
      const EncodedFrame& ef = stream.frames[j];
      if (ef.is_iframe()) {
        ++s.iframes;
        s.tokens += m;
      } else {
        ++s.pframes;
        s.tokens += n;
        s.residual_abs_sum += ef.pframe().residual.abs_sum();
        s.max_motion = std::max(s.max_motion, ef.pframe().motion.max_abs_component());
      }
    }
    stats.push_back(s);
  }
  return stats;
}

}  // namespace codectok
