// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "codectok/nn/checkpoint.hpp"

#include <limits>
#include <unordered_map>

#include "codectok/bytes.hpp"

namespace codectok::nn {

std::vector<std::uint8_t> serialize_checkpoint(const std::vector<NamedTensor>& tensors) {
  ByteWriter w;
  w.text("CPNN");
  w.u16(kCheckpointVersion);
  for (const auto& [name, tensor] : tensors) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max())
      throw FormatError("checkpoint: tensor name too long: " + name.substr(0, 32) + "...");
    if (tensor.rank() > std::numeric_limits<std::uint8_t>::max())
      throw FormatError("checkpoint: rank too large for " + name);
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.text(name);
    w.u8(static_cast<std::uint8_t>(tensor.rank()));
    for (int d : tensor.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : tensor.data()) w.f64(v);
  }
  return w.take();
}

std::vector<NamedTensor> parse_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || r.text(4) != "CPNN") throw FormatError("not a CPNN file", 0);
  const std::uint16_t version = r.u16();
  if (version != kCheckpointVersion)
    throw FormatError("unsupported CPNN version " + std::to_string(version), 4);
  std::vector<NamedTensor> out;
  while (!r.done()) {
    const std::size_t start = r.offset();
    try {
      NamedTensor nt;
      nt.name = r.text(r.u16());
      const int rank = r.u8();
      std::vector<int> shape(static_cast<std::size_t>(rank));
      std::size_t count = 1;
      for (int& d : shape) {
        const std::uint32_t v = r.u32();
        if (v > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
          throw FormatError("dimension too large", r.offset());
        d = static_cast<int>(v);
        count *= v;
      }
      if (count > r.remaining() / 8)
        throw FormatError("tensor '" + nt.name + "' needs " + std::to_string(count * 8) +
                              " bytes, " + std::to_string(r.remaining()) + " left",
                          r.offset());
      std::vector<double> data(count);
      for (double& v : data) v = r.f64();
      nt.tensor = Tensor(std::move(shape), std::move(data));
      out.push_back(std::move(nt));
    } catch (const FormatError& e) {
      throw FormatError("truncated CPNN record starting at byte " + std::to_string(start) + ": " + e.what(),
                        r.offset());
    }
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  write_file_atomic(path, serialize_checkpoint(tensors));
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

std::vector<NamedTensor> snapshot(const ParamList& params) {
  std::vector<NamedTensor> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back({p->name, p->value});
  return out;
}

void restore(const ParamList& params, const std::vector<NamedTensor>& tensors) {
  std::unordered_map<std::string, const Tensor*> by_name;
  for (const auto& nt : tensors) by_name[nt.name] = &nt.tensor;
  for (Parameter* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw FormatError("checkpoint is missing parameter " + p->name);
    if (it->second->shape() != p->value.shape())
      throw FormatError("checkpoint shape " + shape_string(it->second->shape()) + " for " + p->name +
                        " does not match " + shape_string(p->value.shape()));
    p->value = *it->second;
    p->grad = Tensor::zeros_like(p->value);
  }
}

}  // namespace codectok::nn
