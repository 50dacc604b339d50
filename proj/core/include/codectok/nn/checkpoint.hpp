// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

// "CPNN" checkpoints.
//
//   magic "CPNN" | version u16 (=1) | records until end of file
//   record: name_len u16 | name utf-8 | rank u8 | dims u32 x rank | f64 data
//
// All integers and floats are little-endian.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "codectok/nn/layers.hpp"

namespace codectok::nn {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

std::vector<std::uint8_t> serialize_checkpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

std::vector<NamedTensor> snapshot(const ParamList& params);
/// Copies values by name. Every parameter must be present with a matching
/// shape; extra records are ignored.
void restore(const ParamList& params, const std::vector<NamedTensor>& tensors);

}  // namespace codectok::nn
