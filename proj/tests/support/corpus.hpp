// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "codectok/stream_model.hpp"
#include "codectok/toy_codec.hpp"

namespace codectok::testing {

struct CorpusVideo {
  std::uint64_t seed = 0;
  SynthKind kind = SynthKind::MovingRect;
  VideoConfig config;
  std::vector<Frame> frames;
};

/// Seeded mixed-kind clips: 16..64 frames, sides in {32, 48, 64}, block 8 or
/// 16, GOP in {16, 24, 48} (all divisible by 2, 4 and 8), every fifth clip RGB.
std::vector<CorpusVideo> make_corpus(int count, std::uint64_t seed);

/// Uniform random u8 frame.
Frame random_frame(int height, int width, int channels, std::uint64_t seed);

}  // namespace codectok::testing
