// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/toy_codec.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <tuple>

#include "codectok/parallel.hpp"
#include "codectok/rng.hpp"

namespace codectok {

namespace {

int clamp_index(int v, int hi) { return std::clamp(v, 0, hi - 1); }

void check_frame(const Frame& f, const VideoConfig& config, const char* what) {
  if (!f.matches(config))
    throw ConfigError(std::string(what) + ": frame shape does not match config");
}

// SAD between the target block at (row0, col0) and the reference sampled at
// clamp(p - d). Stops once the running sum exceeds `limit`.
std::int64_t block_sad(const Frame& target, const Frame& reference, int row0, int col0,
                       int block, int d_row, int d_col, std::int64_t limit) {
  const int h = target.height();
  const int w = target.width();
  const int c = target.channels();
  const auto tp = target.pixels();
  const auto rp = reference.pixels();
  std::int64_t sad = 0;

  const bool inside = row0 - d_row >= 0 && row0 + block - 1 - d_row < h &&
                      col0 - d_col >= 0 && col0 + block - 1 - d_col < w;
  for (int r = 0; r < block; ++r) {
    const int tr = row0 + r;
    const int sr = inside ? tr - d_row : clamp_index(tr - d_row, h);
    const std::uint8_t* trow = tp.data() + (static_cast<std::size_t>(tr) * w + col0) * c;
    if (inside) {
      const std::uint8_t* srow =
          rp.data() + (static_cast<std::size_t>(sr) * w + (col0 - d_col)) * c;
      const int n = block * c;
      for (int i = 0; i < n; ++i) sad += std::abs(static_cast<int>(trow[i]) - srow[i]);
    } else {
      for (int k = 0; k < block; ++k) {
        const int sc = clamp_index(col0 + k - d_col, w);
        const std::uint8_t* spx = rp.data() + (static_cast<std::size_t>(sr) * w + sc) * c;
        for (int ch = 0; ch < c; ++ch)
          sad += std::abs(static_cast<int>(trow[k * c + ch]) - spx[ch]);
      }
    }
    if (sad > limit) return sad;
  }
  return sad;
}

std::uint8_t texture_value(std::uint64_t seed, std::int64_t row, std::int64_t col, int ch) {
  std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(row));
  h = hash_combine(h, static_cast<std::uint64_t>(col));
  h = hash_combine(h, static_cast<std::uint64_t>(ch));
  return static_cast<std::uint8_t>(16 + h % 184);  // [16, 199]
}

}  // namespace

Prediction warp(const Frame& reference, const MotionField& motion) {
  const int h = reference.height();
  const int w = reference.width();
  const int c = reference.channels();
  if (motion.grid_rows() * motion.block_size() != h ||
      motion.grid_cols() * motion.block_size() != w)
    throw ConfigError("warp: motion grid does not cover the reference frame");

  Prediction out{h, w, c, std::vector<std::int16_t>(reference.pixels().size())};
  const auto src = reference.pixels();
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      const MotionVector& v = motion.at_pixel(r, col);
      const int sr = clamp_index(r - v.d_row, h);
      const int sc = clamp_index(col - v.d_col, w);
      const std::size_t dst = (static_cast<std::size_t>(r) * w + col) * c;
      const std::size_t from = (static_cast<std::size_t>(sr) * w + sc) * c;
      for (int ch = 0; ch < c; ++ch) out.values[dst + ch] = src[from + ch];
    }
  }
  return out;
}

MotionField estimate_motion(const Frame& target, const Frame& reference, int block_size,
                            const EncoderParams& params) {
  if (target.height() != reference.height() || target.width() != reference.width() ||
      target.channels() != reference.channels())
    throw ConfigError("estimate_motion: target and reference shapes differ");
  if (block_size <= 0 || target.height() % block_size != 0 || target.width() % block_size != 0)
    throw ConfigError("estimate_motion: frame dims not divisible by block size");
  if (params.search_radius < 0) throw ConfigError("estimate_motion: negative search radius");

  const int radius = params.search_radius;
  MotionField field(target.height() / block_size, target.width() / block_size, block_size);
  const auto blocks = static_cast<std::size_t>(field.grid_rows()) * field.grid_cols();

  parallel_for(blocks, params.threads, [&](std::size_t b) {
    const int br = static_cast<int>(b) / field.grid_cols();
    const int bc = static_cast<int>(b) % field.grid_cols();
    const int row0 = br * block_size;
    const int col0 = bc * block_size;

    using Key = std::tuple<std::int64_t, int, int, int>;
    Key best{std::numeric_limits<std::int64_t>::max(), 0, 0, 0};
    for (int dr = -radius; dr <= radius; ++dr) {
      for (int dc = -radius; dc <= radius; ++dc) {
        const std::int64_t sad = block_sad(target, reference, row0, col0, block_size, dr, dc,
                                           std::get<0>(best));
        if (sad > std::get<0>(best)) continue;
        const Key key{sad, dr * dr + dc * dc, dr, dc};
        if (key < best) best = key;
      }
    }
    field.at(br, bc) = {std::get<2>(best), std::get<3>(best)};
  });
  return field;
}

ResidualPlane compute_residual(const Frame& target, const Prediction& prediction) {
  if (target.height() != prediction.height || target.width() != prediction.width ||
      target.channels() != prediction.channels)
    throw ConfigError("compute_residual: shape mismatch");
  ResidualPlane residual(target.height(), target.width(), target.channels());
  const auto t = target.pixels();
  auto out = residual.values();
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = static_cast<std::int16_t>(static_cast<int>(t[i]) - prediction.values[i]);
  return residual;
}

Frame reconstruct(const Prediction& prediction, const ResidualPlane& residual) {
  if (residual.height() != prediction.height || residual.width() != prediction.width ||
      residual.channels() != prediction.channels)
    throw ConfigError("reconstruct: shape mismatch");
  Frame out(prediction.height, prediction.width, prediction.channels);
  auto px = out.pixels();
  const auto res = residual.values();
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<std::uint8_t>(std::clamp(prediction.values[i] + res[i], 0, 255));
  return out;
}

CodecStream encode(const std::vector<Frame>& frames, const VideoConfig& config,
                   const EncoderParams& params) {
  if (frames.empty()) throw ArgumentError("encode: no frames");
  VideoConfig stream_config = config;
  stream_config.fusion_window = 1;
  stream_config.validate();
  for (const auto& f : frames) check_frame(f, stream_config, "encode");

  CodecStream stream{stream_config, {}};
  stream.frames.reserve(frames.size());
  // The codec is lossless, so the decoder's reconstruction of frame t-1 is
  // frames[t-1] itself.
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (t % static_cast<std::size_t>(config.gop_size) == 0) {
      stream.frames.push_back({IFrame{frames[t]}});
      continue;
    }
    const Frame& reference = frames[t - 1];
    MotionField motion = estimate_motion(frames[t], reference, config.block_size, params);
    ResidualPlane residual = compute_residual(frames[t], warp(reference, motion));
    stream.frames.push_back({PFrame{1, std::move(motion), std::move(residual)}});
  }
  return stream;
}

std::vector<Frame> decode(const CodecStream& stream, int threads) {
  stream.config.validate();
  const std::size_t gops = stream.gop_count();
  std::vector<Frame> out(stream.frames.size());
  const std::int64_t stride = stream.stride();

  parallel_for(gops, threads, [&](std::size_t g) {
    const auto [first, last] = stream.gop_entries(g);
    for (std::size_t j = first; j < last; ++j) {
      const EncodedFrame& ef = stream.frames[j];
      if (ef.is_iframe()) {
        if (!ef.iframe().image.matches(stream.config))
          throw StreamIntegrityError("decode: I-frame " + std::to_string(j) + " has wrong shape");
        out[j] = ef.iframe().image;
        continue;
      }
      const PFrame& p = ef.pframe();
      const std::int64_t ref_t = stream.timestamp(j) - p.ref_offset;
      const std::int64_t gop_start = static_cast<std::int64_t>(first) * stride;
      if (p.ref_offset <= 0 || ref_t < gop_start || ref_t % stride != 0)
        throw StreamIntegrityError("decode: P-frame " + std::to_string(j) +
                                   " has a dangling reference (ref_offset " +
                                   std::to_string(p.ref_offset) + ")");
      const auto ref_j = static_cast<std::size_t>(ref_t / stride);
      out[j] = reconstruct(warp(out[ref_j], p.motion), p.residual);
    }
  });
  return out;
}

const char* to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::MovingRect: return "moving_rect";
    case SynthKind::TranslatingTexture: return "translating_texture";
    case SynthKind::NoiseDrift: return "noise_drift";
  }
  return "unknown";
}

SynthKind synth_kind_from_string(const std::string& name) {
  if (name == "moving_rect") return SynthKind::MovingRect;
  if (name == "translating_texture") return SynthKind::TranslatingTexture;
  if (name == "noise_drift") return SynthKind::NoiseDrift;
  throw ArgumentError("unknown synthetic video kind '" + name + "'");
}

MovingRectParams moving_rect_params(std::uint64_t seed, const VideoConfig& config) {
  Rng rng(hash_combine(seed, 0x5245435454ULL));
  MovingRectParams p;
  p.rect_height = rng.uniform_int(std::max(2, config.height / 4), std::max(2, config.height / 2));
  p.rect_width = rng.uniform_int(std::max(2, config.width / 4), std::max(2, config.width / 2));
  do {
    p.velocity_row = rng.uniform_int(-3, 3);
    p.velocity_col = rng.uniform_int(-3, 3);
  } while (p.velocity_row == 0 && p.velocity_col == 0);
  // Keep the first step clear of the borders.
  const int row_lo = std::abs(p.velocity_row);
  const int row_hi = std::max(row_lo, config.height - p.rect_height - std::abs(p.velocity_row));
  const int col_lo = std::abs(p.velocity_col);
  const int col_hi = std::max(col_lo, config.width - p.rect_width - std::abs(p.velocity_col));
  p.start_row = rng.uniform_int(row_lo, row_hi);
  p.start_col = rng.uniform_int(col_lo, col_hi);
  p.brightness = static_cast<std::uint8_t>(rng.uniform_int(230, 255));
  return p;
}

MotionVector translating_texture_velocity(std::uint64_t seed) {
  Rng rng(hash_combine(seed, 0x5458ULL));
  MotionVector v;
  do {
    v.d_row = rng.uniform_int(-3, 3);
    v.d_col = rng.uniform_int(-3, 3);
  } while (v.d_row == 0 && v.d_col == 0);
  return v;
}

std::vector<Frame> synth_translating_texture(std::uint64_t seed, const VideoConfig& config,
                                             int length, MotionVector velocity) {
  if (length < 1) throw ArgumentError("synth_video: length must be at least 1");
  const std::uint64_t tex_seed = hash_combine(seed, 0x7465ULL);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    Frame f(config.height, config.width, config.channels);
    for (int r = 0; r < config.height; ++r)
      for (int c = 0; c < config.width; ++c)
        for (int ch = 0; ch < config.channels; ++ch)
          f.at(r, c, ch) = texture_value(tex_seed, static_cast<std::int64_t>(r) - t * velocity.d_row,
                                         static_cast<std::int64_t>(c) - t * velocity.d_col, ch);
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<Frame> synth_video(SynthKind kind, std::uint64_t seed, const VideoConfig& config,
                               int length) {
  if (length < 1) throw ArgumentError("synth_video: length must be at least 1");
  if (config.width <= 0 || config.height <= 0 || (config.channels != 1 && config.channels != 3))
    throw ConfigError("synth_video: invalid frame shape");

  if (kind == SynthKind::TranslatingTexture)
    return synth_translating_texture(seed, config, length, translating_texture_velocity(seed));

  const std::uint64_t bg_seed = hash_combine(seed, 0x6267ULL);
  Frame background(config.height, config.width, config.channels);
  for (int r = 0; r < config.height; ++r)
    for (int c = 0; c < config.width; ++c)
      for (int ch = 0; ch < config.channels; ++ch)
        background.at(r, c, ch) = texture_value(bg_seed, r, c, ch);

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(length));

  if (kind == SynthKind::NoiseDrift) {
    Rng rng(hash_combine(seed, 0x6e64ULL));
    for (int t = 0; t < length; ++t) {
      Frame f = background;
      for (auto& px : f.pixels()) px = static_cast<std::uint8_t>(px + rng.uniform_int(-3, 3));
      frames.push_back(std::move(f));
    }
    return frames;
  }

  const MovingRectParams p = moving_rect_params(seed, config);
  const std::uint64_t rect_seed = hash_combine(seed, 0x7274ULL);
  int row = p.start_row;
  int col = p.start_col;
  int vr = p.velocity_row;
  int vc = p.velocity_col;
  const int max_row = std::max(0, config.height - p.rect_height);
  const int max_col = std::max(0, config.width - p.rect_width);
  for (int t = 0; t < length; ++t) {
    Frame f = background;
    for (int r = 0; r < p.rect_height && row + r < config.height; ++r)
      for (int c = 0; c < p.rect_width && col + c < config.width; ++c)
        for (int ch = 0; ch < config.channels; ++ch) {
          // Bright rectangle with a faint texture of its own so it can be tracked.
          const int jitter = static_cast<int>(hash_combine(rect_seed, static_cast<std::uint64_t>(r * 4096 + c * 4 + ch)) % 26);
          f.at(row + r, col + c, ch) = static_cast<std::uint8_t>(std::max<int>(230, p.brightness - jitter));
        }
    frames.push_back(std::move(f));

    if (row + vr < 0 || row + vr > max_row) vr = -vr;
    if (col + vc < 0 || col + vc > max_col) vc = -vc;
    row = std::clamp(row + vr, 0, max_row);
    col = std::clamp(col + vc, 0, max_col);
  }
  return frames;
}

}  // namespace codectok
