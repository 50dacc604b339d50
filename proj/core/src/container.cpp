// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/container.hpp"

#include <limits>

#include "json.hpp"

namespace codectok {

namespace {

constexpr std::uint8_t kTagI = 0;
constexpr std::uint8_t kTagP = 1;

template <typename T>
T checked(std::int64_t v, const char* field) {
  if (v < 0 || v > static_cast<std::int64_t>(std::numeric_limits<T>::max()))
    throw ArgumentError(std::string("CPVS: ") + field + " does not fit its header field");
  return static_cast<T>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_stream(const CodecStream& stream) {
  if (stream.frames.empty()) throw ArgumentError("CPVS: a stream needs at least one frame");
  const ValidationReport report = validate_stream(stream);
  if (!report.ok()) throw StreamIntegrityError("CPVS: refusing to write invalid stream: " + report.to_string());

  const VideoConfig& c = stream.config;
  ByteWriter w;
  w.text("CPVS");
  w.u16(kContainerVersion);
  w.u32(checked<std::uint32_t>(c.width, "width"));
  w.u32(checked<std::uint32_t>(c.height, "height"));
  w.u8(checked<std::uint8_t>(c.channels, "channels"));
  w.u8(checked<std::uint8_t>(c.block_size, "block_size"));
  w.u32(checked<std::uint32_t>(c.gop_size, "gop_size"));
  w.u16(checked<std::uint16_t>(c.fps, "fps"));
  w.u32(checked<std::uint32_t>(c.fusion_window, "fusion_window"));
  w.u32(checked<std::uint32_t>(static_cast<std::int64_t>(stream.frames.size()), "frame_count"));

  for (const EncodedFrame& f : stream.frames) {
    if (f.is_iframe()) {
      w.u8(kTagI);
      w.raw(f.iframe().image.pixels());
    } else {
      const PFrame& p = f.pframe();
      w.u8(kTagP);
      w.u32(static_cast<std::uint32_t>(p.ref_offset));
      for (const MotionVector& v : p.motion.vectors()) {
        w.i16(static_cast<std::int16_t>(v.d_row));
        w.i16(static_cast<std::int16_t>(v.d_col));
      }
      for (std::int16_t r : p.residual.values()) w.i16(r);
    }
  }
  return w.take();
}

CodecStream parse_stream(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || r.text(4) != "CPVS") throw FormatError("not a CPVS file", 0);
  const std::uint16_t version = r.u16();
  if (version != kContainerVersion)
    throw FormatError("unsupported CPVS version " + std::to_string(version) + " (expected " +
                          std::to_string(kContainerVersion) + ")",
                      4);

  CodecStream s;
  VideoConfig& c = s.config;
  c.width = static_cast<int>(r.u32());
  c.height = static_cast<int>(r.u32());
  c.channels = r.u8();
  c.block_size = r.u8();
  c.gop_size = static_cast<int>(r.u32());
  c.fps = r.u16();
  c.fusion_window = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("CPVS header: ") + e.what(), 6);
  }
  if (count == 0) throw FormatError("CPVS header: frame_count must be at least 1", 26);

  const std::size_t pixels = c.pixel_count();
  const std::size_t blocks = static_cast<std::size_t>(c.grid_rows()) * c.grid_cols();
  s.frames.reserve(count);
  for (std::uint32_t j = 0; j < count; ++j) {
    const std::size_t start = r.offset();
    try {
      const std::uint8_t tag = r.u8();
      if (tag == kTagI) {
        const auto raw = r.raw(pixels);
        s.frames.push_back({IFrame{Frame(c.height, c.width, c.channels, {raw.begin(), raw.end()})}});
      } else if (tag == kTagP) {
        PFrame p;
        const std::uint32_t ref = r.u32();
        if (ref == 0 || ref > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
          throw FormatError("frame " + std::to_string(j) + ": bad ref_offset " + std::to_string(ref), start + 1);
        p.ref_offset = static_cast<int>(ref);
        p.motion = MotionField(c.grid_rows(), c.grid_cols(), c.block_size);
        for (std::size_t b = 0; b < blocks; ++b) {
          MotionVector& v = p.motion.at(static_cast<int>(b) / c.grid_cols(), static_cast<int>(b) % c.grid_cols());
          v.d_row = r.i16();
          v.d_col = r.i16();
        }
        p.residual = ResidualPlane(c.height, c.width, c.channels);
        for (std::int16_t& v : p.residual.values()) v = r.i16();
        s.frames.push_back({std::move(p)});
      } else {
        throw FormatError("frame " + std::to_string(j) + ": unknown tag " + std::to_string(tag), start);
      }
    } catch (const FormatError& e) {
      if (std::string(e.what()).rfind("frame ", 0) == 0) throw;
      throw FormatError("truncated CPVS file in frame " + std::to_string(j) + " (frame starts at byte " +
                            std::to_string(start) + ")",
                        r.offset());
    }
  }
  if (!r.done()) throw FormatError("trailing bytes after last frame", r.offset());

  const ValidationReport report = validate_stream(s);
  if (!report.ok()) throw StreamIntegrityError("CPVS: stream fails validation: " + report.to_string());
  return s;
}

std::size_t write_stream(const CodecStream& stream, const std::filesystem::path& path) {
  const auto bytes = serialize_stream(stream);
  write_file_atomic(path, bytes);
  return bytes.size();
}

CodecStream read_stream(const std::filesystem::path& path) { return parse_stream(read_file(path)); }

std::filesystem::path raw_sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_raw_video(const RawVideo& video, const std::filesystem::path& path) {
  if (video.frames.empty()) throw ArgumentError("raw video: no frames");
  ByteWriter w;
  for (const Frame& f : video.frames) {
    if (f.height() != video.height || f.width() != video.width || f.channels() != video.channels)
      throw ArgumentError("raw video: frame shape differs from the header");
    for (int ch = 0; ch < f.channels(); ++ch)
      for (int r = 0; r < f.height(); ++r)
        for (int c = 0; c < f.width(); ++c) w.u8(f.at(r, c, ch));
  }
  nlohmann::ordered_json meta{{"width", video.width},
                              {"height", video.height},
                              {"channels", video.channels},
                              {"fps", video.fps},
                              {"frame_count", video.frames.size()}};
  write_file_atomic(path, w.bytes());
  write_text_atomic(raw_sidecar_path(path), meta.dump(2) + "\n");
}

RawVideo read_raw_video(const std::filesystem::path& path) {
  const auto sidecar = read_file(raw_sidecar_path(path));
  RawVideo v;
  std::size_t count = 0;
  try {
    const auto meta = nlohmann::json::parse(sidecar.begin(), sidecar.end());
    v.width = meta.at("width").get<int>();
    v.height = meta.at("height").get<int>();
    v.channels = meta.at("channels").get<int>();
    v.fps = meta.value("fps", 30);
    count = meta.at("frame_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("raw sidecar " + raw_sidecar_path(path).string() + ": " + e.what());
  }
  if (v.width <= 0 || v.height <= 0 || (v.channels != 1 && v.channels != 3) || count == 0)
    throw FormatError("raw sidecar " + raw_sidecar_path(path).string() + ": invalid dimensions");
  const auto bytes = read_file(path);
  const std::size_t frame_bytes = static_cast<std::size_t>(v.width) * v.height * v.channels;
  if (bytes.size() != frame_bytes * count)
    throw FormatError("raw video " + path.string() + ": expected " + std::to_string(frame_bytes * count) +
                          " bytes, found " + std::to_string(bytes.size()),
                      std::min(bytes.size(), frame_bytes * count));
  std::size_t k = 0;
  for (std::size_t j = 0; j < count; ++j) {
    Frame f(v.height, v.width, v.channels);
    for (int ch = 0; ch < v.channels; ++ch)
      for (int r = 0; r < v.height; ++r)
        for (int c = 0; c < v.width; ++c) f.at(r, c, ch) = bytes[k++];
    v.frames.push_back(std::move(f));
  }
  return v;
}

std::string token_stream_jsonl(const TokenStream& tokens) {
  std::string out;
  for (const TokenEntry& e : tokens.entries) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int r = 0; r < e.rows; ++r) {
      const auto first = e.tokens.begin() + static_cast<std::ptrdiff_t>(r) * e.cols;
      rows.push_back(std::vector<float>(first, first + e.cols));
    }
    nlohmann::ordered_json j{
        {"role", e.role == TokenRole::I ? "I" : "P"}, {"frame_index", e.frame_index}, {"tokens", std::move(rows)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace codectok
