// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/fusion.hpp"

#include <algorithm>

#include "codectok/parallel.hpp"
#include "codectok/toy_codec.hpp"

namespace codectok {

namespace {

void require_valid(const CodecStream& stream, const char* what) {
  const ValidationReport report = validate_stream(stream);
  if (!report.ok())
    throw ArgumentError(std::string(what) + ": invalid input stream: " + report.to_string());
}

}  // namespace

MotionField compose_motion(const std::vector<MotionField>& fields) {
  if (fields.empty()) throw ArgumentError("compose_motion: empty field list");
  const MotionField& newest = fields.back();
  const int rows = newest.grid_rows();
  const int cols = newest.grid_cols();
  const int block = newest.block_size();
  for (const auto& f : fields)
    if (f.grid_rows() != rows || f.grid_cols() != cols || f.block_size() != block)
      throw ConfigError("compose_motion: fields disagree on grid dims");

  const int height = rows * block;
  const int width = cols * block;
  MotionField out(rows, cols, block);
  for (int br = 0; br < rows; ++br) {
    for (int bc = 0; bc < cols; ++bc) {
      const int center_row = br * block + block / 2;
      const int center_col = bc * block + block / 2;
      MotionVector v = newest.at(br, bc);
      for (auto older = fields.rbegin() + 1; older != fields.rend(); ++older) {
        const int src_row = std::clamp(center_row - v.d_row, 0, height - 1);
        const int src_col = std::clamp(center_col - v.d_col, 0, width - 1);
        const MotionVector& step = older->at(src_row / block, src_col / block);
        v.d_row += step.d_row;
        v.d_col += step.d_col;
      }
      out.at(br, bc) = v;
    }
  }
  return out;
}

CodecStream fuse_gop(const CodecStream& stream, const FusionPlan& plan, int threads) {
  if (plan.window < 1) throw ConfigError("fuse_gop: window must be positive");
  if (stream.config.gop_size % plan.window != 0)
    throw ConfigError("fuse_gop: gop_size " + std::to_string(stream.config.gop_size) +
                      " is not a multiple of window " + std::to_string(plan.window));
  if (stream.config.fusion_window != 1)
    throw ArgumentError("fuse_gop: stream is already fused");
  for (const auto& ef : stream.frames)
    if (!ef.is_iframe() && ef.pframe().ref_offset != 1)
      throw ArgumentError("fuse_gop: stream is already fused");
  require_valid(stream, "fuse_gop");
  if (plan.window == 1) return stream;

  const std::vector<Frame> pixels = decode(stream, threads);
  const auto total = pixels.size();
  const auto s = static_cast<std::size_t>(plan.window);

  CodecStream fused;
  fused.config = stream.config;
  fused.config.fusion_window = plan.window;
  fused.frames.resize((total + s - 1) / s);

  parallel_for(fused.frames.size(), threads, [&](std::size_t j) {
    const std::size_t t = j * s;
    const EncodedFrame& original = stream.frames[t];
    if (original.is_iframe()) {
      fused.frames[j] = original;
      return;
    }
    std::vector<MotionField> chain;
    chain.reserve(s);
    for (std::size_t u = t - s + 1; u <= t; ++u) chain.push_back(stream.frames[u].pframe().motion);
    MotionField motion = compose_motion(chain);
    ResidualPlane residual = compute_residual(pixels[t], warp(pixels[t - s], motion));
    fused.frames[j] = {PFrame{plan.window, std::move(motion), std::move(residual)}};
  });
  return fused;
}

std::vector<int> keyframe_slots(int slots, int keyframes) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(keyframes));
  for (int j = 0; j < keyframes; ++j)
    out.push_back(static_cast<int>(static_cast<long long>(j) * slots / keyframes));
  return out;
}

CodecStream keyframe_promote(const CodecStream& stream, int keyframes_per_gop, int threads) {
  const int slots = stream.slots_per_gop();
  if (keyframes_per_gop < 1) throw ArgumentError("keyframe_promote: k must be at least 1");
  if (keyframes_per_gop > slots)
    throw ArgumentError("keyframe_promote: k = " + std::to_string(keyframes_per_gop) +
                        " exceeds slots per GOP (" + std::to_string(slots) + ")");
  require_valid(stream, "keyframe_promote");

  const std::vector<Frame> pixels = decode(stream, threads);
  CodecStream out;
  out.config = stream.config;
  out.frames.resize(stream.frames.size());

  parallel_for(stream.gop_count(), threads, [&](std::size_t g) {
    const auto [first, last] = stream.gop_entries(g);
    const int present = static_cast<int>(last - first);
    std::vector<bool> key(static_cast<std::size_t>(present), false);
    for (int slot : keyframe_slots(present, std::min(keyframes_per_gop, present)))
      key[static_cast<std::size_t>(slot)] = true;

    for (std::size_t j = first; j < last; ++j) {
      if (key[j - first]) {
        out.frames[j] = {IFrame{pixels[j]}};
        continue;
      }
      // Previous slot is always retained (as I or P) and decodes exactly.
      MotionField motion = stream.frames[j].is_iframe()
                               ? MotionField(stream.config.grid_rows(), stream.config.grid_cols(),
                                             stream.config.block_size)
                               : stream.frames[j].pframe().motion;
      ResidualPlane residual = compute_residual(pixels[j], warp(pixels[j - 1], motion));
      out.frames[j] = {PFrame{stream.stride(), std::move(motion), std::move(residual)}};
    }
  });
  return out;
}

}  // namespace codectok
