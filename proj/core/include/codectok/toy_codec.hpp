// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Lossless block-matching I/P codec.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codectok/stream_model.hpp"

namespace codectok {

enum class MatchCost { SAD };

struct EncoderParams {
  int search_radius = 8;
  MatchCost cost = MatchCost::SAD;
  /// 0 picks the hardware concurrency. Output never depends on this.
  int threads = 0;
};

/// Motion-compensated prediction, same layout as Frame but signed so callers
/// can add a residual without overflow.
struct Prediction {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::int16_t> values;
};

/// out[i] = reference[clamp(i - motion(i))], each axis clamped independently.
Prediction warp(const Frame& reference, const MotionField& motion);

/// Exhaustive SAD search over [-R, R]^2 per block. Ties resolve on
/// (SAD, |v|^2, d_row, d_col) lexicographically.
MotionField estimate_motion(const Frame& target, const Frame& reference,
                            int block_size, const EncoderParams& params);

/// target - prediction.
ResidualPlane compute_residual(const Frame& target, const Prediction& prediction);

/// prediction + residual, clamped to [0, 255].
Frame reconstruct(const Prediction& prediction, const ResidualPlane& residual);

/// I-frame at every GOP boundary, plain P-frames (ref_offset 1) elsewhere.
/// The returned stream carries fusion_window = 1.
CodecStream encode(const std::vector<Frame>& frames, const VideoConfig& config,
                   const EncoderParams& params = {});

/// Reconstructs one frame per entry. GOPs are decoded independently and in
/// parallel when threads != 1; the output does not depend on thread count.
std::vector<Frame> decode(const CodecStream& stream, int threads = 1);

enum class SynthKind { MovingRect, TranslatingTexture, NoiseDrift };

const char* to_string(SynthKind kind);
SynthKind synth_kind_from_string(const std::string& name);

/// Rectangle trajectory parameters drawn by synth_video for MovingRect.
struct MovingRectParams {
  int rect_height = 0;
  int rect_width = 0;
  int start_row = 0;
  int start_col = 0;
  int velocity_row = 0;
  int velocity_col = 0;
  std::uint8_t brightness = 255;
};

MovingRectParams moving_rect_params(std::uint64_t seed, const VideoConfig& config);

/// Global shift per frame used by TranslatingTexture.
MotionVector translating_texture_velocity(std::uint64_t seed);

/// Deterministic synthetic video. Background textures stay below 200 so the
/// MovingRect rectangle (>= 230) is always separable.
std::vector<Frame> synth_video(SynthKind kind, std::uint64_t seed,
                               const VideoConfig& config, int length);

/// TranslatingTexture with an explicit velocity.
std::vector<Frame> synth_translating_texture(std::uint64_t seed,
                                             const VideoConfig& config, int length,
                                             MotionVector velocity);

}  // namespace codectok
