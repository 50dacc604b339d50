// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// Codec-domain and token-domain data types shared by every other module.
//
// A video is a sequence of Frames. The toy codec turns it into a CodecStream
// made of I-frames (raw pixels) and P-frames (a block MotionField plus a
// per-pixel ResidualPlane). Decoding follows
//
//   out[i] = ref[clamp(i - motion(i))] + residual[i]
//
// so a motion vector (d_row, d_col) names where the source pixel sits
// relative to the target: source = target - displacement.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace codectok {

/// Raised when a configuration or a shape does not satisfy its invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed call arguments (empty inputs, out-of-range counts).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a CodecStream cannot be decoded (dangling references etc).
class StreamIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VideoConfig {
  int width = 64;
  int height = 64;
  int channels = 1;
  int block_size = 16;
  int gop_size = 240;
  int fps = 30;
  /// Temporal stride of the entries in a stream. A freshly encoded stream
  /// carries 1; fuse_gop rewrites it to the fusion window.
  int fusion_window = 30;

  int grid_rows() const { return height / block_size; }
  int grid_cols() const { return width / block_size; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height * channels;
  }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const VideoConfig&, const VideoConfig&) = default;
};

/// Dense u8 raster, height x width x channels, row-major interleaved.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, int channels);
  Frame(int height, int width, int channels, std::vector<std::uint8_t> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  std::uint8_t at(int row, int col, int ch = 0) const {
    return pixels_[index(row, col, ch)];
  }
  std::uint8_t& at(int row, int col, int ch = 0) {
    return pixels_[index(row, col, ch)];
  }
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  bool matches(const VideoConfig& config) const {
    return height_ == config.height && width_ == config.width &&
           channels_ == config.channels;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct MotionVector {
  int d_row = 0;
  int d_col = 0;
  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

/// One displacement per block_size x block_size block.
class MotionField {
 public:
  MotionField() = default;
  MotionField(int grid_rows, int grid_cols, int block_size);

  int grid_rows() const { return rows_; }
  int grid_cols() const { return cols_; }
  int block_size() const { return block_size_; }

  const MotionVector& at(int block_row, int block_col) const {
    return vectors_[static_cast<std::size_t>(block_row) * cols_ + block_col];
  }
  MotionVector& at(int block_row, int block_col) {
    return vectors_[static_cast<std::size_t>(block_row) * cols_ + block_col];
  }
  /// Vector governing pixel (row, col).
  const MotionVector& at_pixel(int row, int col) const {
    return at(row / block_size_, col / block_size_);
  }
  std::span<const MotionVector> vectors() const { return vectors_; }

  /// Pixel-resolution tensor, H x W x 2 (d_row, d_col), block replicated.
  std::vector<std::int32_t> expand_dense() const;
  /// Inverse of expand_dense: samples the top-left pixel of every block.
  static MotionField from_dense(std::span<const std::int32_t> dense, int height,
                                int width, int block_size);

  bool is_zero() const;
  int max_abs_component() const;

  friend bool operator==(const MotionField&, const MotionField&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int block_size_ = 1;
  std::vector<MotionVector> vectors_;
};

/// Signed per-pixel correction, same layout as Frame.
class ResidualPlane {
 public:
  ResidualPlane() = default;
  ResidualPlane(int height, int width, int channels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  std::int16_t at(int row, int col, int ch = 0) const {
    return values_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  std::span<const std::int16_t> values() const { return values_; }
  std::span<std::int16_t> values() { return values_; }

  bool is_zero() const;
  /// Sum of |value| over all samples.
  std::int64_t abs_sum() const;

  friend bool operator==(const ResidualPlane&, const ResidualPlane&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<std::int16_t> values_;
};

struct IFrame {
  Frame image;
  friend bool operator==(const IFrame&, const IFrame&) = default;
};

struct PFrame {
  /// Distance to the reference, in pre-fusion frame units.
  int ref_offset = 1;
  MotionField motion;
  ResidualPlane residual;
  friend bool operator==(const PFrame&, const PFrame&) = default;
};

struct EncodedFrame {
  std::variant<IFrame, PFrame> kind;

  bool is_iframe() const { return std::holds_alternative<IFrame>(kind); }
  const IFrame& iframe() const { return std::get<IFrame>(kind); }
  const PFrame& pframe() const { return std::get<PFrame>(kind); }

  friend bool operator==(const EncodedFrame&, const EncodedFrame&) = default;
};

/// Frames in display order. Entry j sits at timestamp j * config.fusion_window
/// (pre-fusion frame units).
struct CodecStream {
  VideoConfig config;
  std::vector<EncodedFrame> frames;

  int stride() const { return config.fusion_window; }
  std::int64_t timestamp(std::size_t entry) const {
    return static_cast<std::int64_t>(entry) * config.fusion_window;
  }
  /// Entries per full GOP.
  int slots_per_gop() const { return config.gop_size / config.fusion_window; }
  std::size_t gop_count() const;
  /// Half-open entry range [first, last) of GOP `gop`.
  std::pair<std::size_t, std::size_t> gop_entries(std::size_t gop) const;

  friend bool operator==(const CodecStream&, const CodecStream&) = default;
};

struct TokenConfig {
  int d = 64;
  int m = 210;
  int k_tau = 4;
  int k_delta = 4;

  int n() const { return k_tau + k_delta; }
  void validate() const;
};

enum class TokenRole { I, P };

struct TokenEntry {
  TokenRole role = TokenRole::I;
  std::int64_t frame_index = 0;
  int rows = 0;
  int cols = 0;
  /// rows x cols, row-major.
  std::vector<float> tokens;
};

struct TokenStream {
  std::vector<TokenEntry> entries;

  std::size_t total_tokens() const;
};

struct Violation {
  /// Entry index, or -1 for stream-level problems.
  std::int64_t frame_index = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every structural and value invariant of a stream. Never throws.
ValidationReport validate_stream(const CodecStream& stream);

}  // namespace codectok
