// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/stream_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "codectok/toy_codec.hpp"

namespace codectok {

void VideoConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("VideoConfig: " + what); };
  if (width <= 0 || height <= 0) fail("width and height must be positive");
  if (channels != 1 && channels != 3) fail("channels must be 1 or 3");
  if (block_size <= 0) fail("block_size must be positive");
  if (width % block_size != 0 || height % block_size != 0)
    fail("width and height must be multiples of block_size");
  if (gop_size <= 0) fail("gop_size must be positive");
  if (fps <= 0) fail("fps must be positive");
  if (fusion_window <= 0) fail("fusion_window must be positive");
  if (fusion_window > gop_size) fail("fusion_window must not exceed gop_size");
  if (gop_size % fusion_window != 0) fail("gop_size must be a multiple of fusion_window");
}

Frame::Frame(int height, int width, int channels)
    : height_(height),
      width_(width),
      channels_(channels),
      pixels_(static_cast<std::size_t>(height) * width * channels, 0) {}

Frame::Frame(int height, int width, int channels, std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  if (pixels_.size() != static_cast<std::size_t>(height) * width * channels)
    throw ConfigError("Frame: pixel buffer does not match shape");
}

MotionField::MotionField(int grid_rows, int grid_cols, int block_size)
    : rows_(grid_rows),
      cols_(grid_cols),
      block_size_(block_size),
      vectors_(static_cast<std::size_t>(grid_rows) * grid_cols) {}

std::vector<std::int32_t> MotionField::expand_dense() const {
  const int height = rows_ * block_size_;
  const int width = cols_ * block_size_;
  std::vector<std::int32_t> dense(static_cast<std::size_t>(height) * width * 2);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const MotionVector& v = at_pixel(r, c);
      const std::size_t i = (static_cast<std::size_t>(r) * width + c) * 2;
      dense[i] = v.d_row;
      dense[i + 1] = v.d_col;
    }
  }
  return dense;
}

MotionField MotionField::from_dense(std::span<const std::int32_t> dense, int height,
                                    int width, int block_size) {
  if (block_size <= 0 || height % block_size != 0 || width % block_size != 0)
    throw ConfigError("MotionField::from_dense: dims not divisible by block size");
  if (dense.size() != static_cast<std::size_t>(height) * width * 2)
    throw ConfigError("MotionField::from_dense: tensor size mismatch");
  MotionField field(height / block_size, width / block_size, block_size);
  for (int br = 0; br < field.rows_; ++br) {
    for (int bc = 0; bc < field.cols_; ++bc) {
      const std::size_t i =
          (static_cast<std::size_t>(br * block_size) * width + bc * block_size) * 2;
      field.at(br, bc) = {dense[i], dense[i + 1]};
    }
  }
  return field;
}

bool MotionField::is_zero() const {
  return std::all_of(vectors_.begin(), vectors_.end(),
                     [](const MotionVector& v) { return v.d_row == 0 && v.d_col == 0; });
}

int MotionField::max_abs_component() const {
  int m = 0;
  for (const auto& v : vectors_) m = std::max({m, std::abs(v.d_row), std::abs(v.d_col)});
  return m;
}

ResidualPlane::ResidualPlane(int height, int width, int channels)
    : height_(height),
      width_(width),
      channels_(channels),
      values_(static_cast<std::size_t>(height) * width * channels, 0) {}

bool ResidualPlane::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](std::int16_t v) { return v == 0; });
}

std::int64_t ResidualPlane::abs_sum() const {
  std::int64_t total = 0;
  for (std::int16_t v : values_) total += std::abs(static_cast<int>(v));
  return total;
}

std::size_t CodecStream::gop_count() const {
  const auto slots = static_cast<std::size_t>(slots_per_gop());
  if (slots == 0) return 0;
  return (frames.size() + slots - 1) / slots;
}

std::pair<std::size_t, std::size_t> CodecStream::gop_entries(std::size_t gop) const {
  const auto slots = static_cast<std::size_t>(slots_per_gop());
  const std::size_t first = gop * slots;
  return {std::min(first, frames.size()), std::min(first + slots, frames.size())};
}

void TokenConfig::validate() const {
  if (d <= 0) throw ConfigError("TokenConfig: d must be positive");
  if (m <= 0) throw ConfigError("TokenConfig: M must be positive");
  if (k_tau <= 0 || k_delta <= 0) throw ConfigError("TokenConfig: K_tau and K_delta must be positive");
}

std::size_t TokenStream::total_tokens() const {
  std::size_t total = 0;
  for (const auto& e : entries) total += static_cast<std::size_t>(e.rows);
  return total;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "pass";
  std::ostringstream out;
  for (const auto& v : violations) {
    if (v.frame_index >= 0) out << "frame " << v.frame_index << ": ";
    out << v.message << '\n';
  }
  return out.str();
}

ValidationReport validate_stream(const CodecStream& stream) {
  ValidationReport report;
  auto add = [&](std::int64_t index, std::string message) {
    report.violations.push_back({index, std::move(message)});
  };

  const VideoConfig& cfg = stream.config;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    add(-1, e.what());
    return report;
  }
  if (stream.frames.empty()) {
    add(-1, "stream has no frames");
    return report;
  }

  const std::int64_t stride = cfg.fusion_window;
  // Decoded entries, filled only while the chain stays intact; used to check
  // that every P-frame reconstructs inside [0, 255].
  std::vector<Frame> decoded(stream.frames.size());
  std::vector<bool> have(stream.frames.size(), false);

  for (std::size_t j = 0; j < stream.frames.size(); ++j) {
    const auto index = static_cast<std::int64_t>(j);
    const std::int64_t t = stream.timestamp(j);
    const std::int64_t gop_start = (t / cfg.gop_size) * cfg.gop_size;
    const EncodedFrame& ef = stream.frames[j];

    if (ef.is_iframe()) {
      if (!ef.iframe().image.matches(cfg)) {
        add(index, "I-frame shape does not match config");
        continue;
      }
      decoded[j] = ef.iframe().image;
      have[j] = true;
      continue;
    }

    if (t == gop_start) add(index, "GOP boundary must be an I-frame");
    const PFrame& p = ef.pframe();
    bool shapes_ok = true;
    if (p.motion.grid_rows() != cfg.grid_rows() || p.motion.grid_cols() != cfg.grid_cols() ||
        p.motion.block_size() != cfg.block_size) {
      add(index, "motion grid does not match config");
      shapes_ok = false;
    }
    if (p.residual.height() != cfg.height || p.residual.width() != cfg.width ||
        p.residual.channels() != cfg.channels) {
      add(index, "residual shape does not match config");
      shapes_ok = false;
    } else {
      for (std::int16_t v : p.residual.values()) {
        if (v < -255 || v > 255) {
          add(index, "residual value outside [-255, 255]");
          shapes_ok = false;
          break;
        }
      }
    }

    if (p.ref_offset <= 0) {
      add(index, "ref_offset must be positive");
      continue;
    }
    if (p.ref_offset != stride) {
      add(index, "ref_offset " + std::to_string(p.ref_offset) + " differs from stream stride " +
                     std::to_string(stride));
    }
    const std::int64_t ref_t = t - p.ref_offset;
    if (ref_t < gop_start) {
      add(index, "reference at timestamp " + std::to_string(ref_t) + " lies outside the GOP");
      continue;
    }
    if (ref_t % stride != 0) {
      add(index, "reference does not land on a stored entry");
      continue;
    }
    const auto ref_j = static_cast<std::size_t>(ref_t / stride);
    if (!shapes_ok || !have[ref_j]) continue;

    const Prediction pred = warp(decoded[ref_j], p.motion);
    bool in_range = true;
    const auto res = p.residual.values();
    for (std::size_t i = 0; i < res.size(); ++i) {
      const int v = pred.values[i] + res[i];
      if (v < 0 || v > 255) {
        in_range = false;
        break;
      }
    }
    if (!in_range) {
      add(index, "prediction + residual leaves [0, 255]");
      continue;
    }
    decoded[j] = reconstruct(pred, p.residual);
    have[j] = true;
  }
  return report;
}

}  // namespace codectok
