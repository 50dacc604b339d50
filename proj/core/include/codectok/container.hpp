// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// On-disk formats.
//
// CPVS container, little-endian:
//   "CPVS" | version u16 | width u32 | height u32 | channels u8 | block_size u8
//   | gop_size u32 | fps u16 | fusion_window u32 | frame_count u32
// then per frame a tag u8 (0 = I, 1 = P):
//   I: height*width*channels u8 pixels, HWC
//   P: ref_offset u32 | grid_rows*grid_cols (d_row i16, d_col i16) | residual i16, HWC
//
// Raw frames: planar u8 (per frame, channel-major) with a JSON sidecar at
// "<path>.json" holding width, height, channels, fps and frame_count.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "codectok/bytes.hpp"
#include "codectok/stream_model.hpp"

namespace codectok {

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 30;

std::vector<std::uint8_t> serialize_stream(const CodecStream& stream);
CodecStream parse_stream(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written.
std::size_t write_stream(const CodecStream& stream, const std::filesystem::path& path);
CodecStream read_stream(const std::filesystem::path& path);

struct RawVideo {
  int width = 0;
  int height = 0;
  int channels = 1;
  int fps = 30;
  std::vector<Frame> frames;
};

void write_raw_video(const RawVideo& video, const std::filesystem::path& path);
RawVideo read_raw_video(const std::filesystem::path& path);
std::filesystem::path raw_sidecar_path(const std::filesystem::path& path);

/// One JSON object per line: {"role":"I"|"P","frame_index":t,"tokens":[[row 0], [row 1], ...]}.
std::string token_stream_jsonl(const TokenStream& tokens);

}  // namespace codectok
