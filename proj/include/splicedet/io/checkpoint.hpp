// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "splicedet/nn/tensor.hpp"

namespace splicedet::io {

struct NamedTensor {
  std::string name;
  nn::Tensor tensor;
};

// On-disk layout (all integers little-endian):
//   8 bytes  magic "SPLCKPT1"
//   u32      format version (currently 1)
//   u64      metadata length, then that many bytes of UTF-8 text
//   u32      tensor count
//   per tensor: u32 name length, name bytes, u32 ndim, u64 dims[ndim],
//               u64 value count, IEEE-754 doubles (little-endian)
//   u32      CRC-32 of every preceding byte
struct CheckpointData {
  std::string meta;  // config snapshot
  std::vector<NamedTensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const CheckpointData& data, const std::string& path);
CheckpointData load_checkpoint(const std::string& path);

}  // namespace splicedet::io
