// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "corpus.hpp"

#include "codectok/rng.hpp"

namespace codectok::testing {

std::vector<CorpusVideo> make_corpus(int count, std::uint64_t seed) {
  static constexpr int kSides[] = {32, 48, 64};
  static constexpr int kGops[] = {16, 24, 48};
  static constexpr SynthKind kKinds[] = {SynthKind::MovingRect, SynthKind::TranslatingTexture, SynthKind::NoiseDrift};
  std::vector<CorpusVideo> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    CorpusVideo v;
    v.seed = hash_combine(seed, static_cast<std::uint64_t>(i));
    Rng rng(v.seed);
    v.kind = kKinds[i % 3];
    v.config.height = kSides[rng.uniform_int(0, 2)];
    v.config.width = kSides[rng.uniform_int(0, 2)];
    v.config.channels = i % 5 == 4 ? 3 : 1;
    v.config.block_size = rng.uniform_int(0, 1) ? 16 : 8;
    v.config.gop_size = kGops[rng.uniform_int(0, 2)];
    v.config.fusion_window = 1;
    const int length = rng.uniform_int(16, 64);
    v.frames = synth_video(v.kind, v.seed, v.config, length);
    out.push_back(std::move(v));
  }
  return out;
}

Frame random_frame(int height, int width, int channels, std::uint64_t seed) {
  Rng rng(seed);
  Frame f(height, width, channels);
  for (auto& px : f.pixels()) px = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return f;
}

}  // namespace codectok::testing
