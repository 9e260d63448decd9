// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace splicedet::vit {

// Geometry of the reconstruction transformer. A tile of image_size² pixels is
// cut into non-overlapping patch_size² patches; each flattened patch becomes
// one token, plus a learnable cls token at position 0.
struct ViTConfig {
  std::size_t image_size = 128;
  std::size_t patch_size = 64;
  std::size_t channels = 3;
  std::size_t model_dim = 64;
  std::size_t depth = 4;
  std::size_t heads = 4;
  std::size_t proj_dim = 4;   // shared k of the low-rank attention
  std::size_t mlp_hidden = 0; // 0 picks 4 * model_dim

  std::size_t grid() const { return image_size / patch_size; }
  std::size_t patch_count() const { return grid() * grid(); }
  std::size_t seq_len() const { return patch_count() + 1; }
  std::size_t patch_dim() const { return patch_size * patch_size * channels; }
  std::size_t head_dim() const { return model_dim / heads; }
  std::size_t mlp_dim() const {
    return mlp_hidden == 0 ? 4 * model_dim : mlp_hidden;
  }

  void validate() const;  // throws UsageError
};

}  // namespace splicedet::vit
