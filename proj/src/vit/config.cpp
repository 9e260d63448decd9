// SPDX-License-Identifier: Apache-2.0
#include "splicedet/vit/config.hpp"

#include "splicedet/errors.hpp"

namespace splicedet::vit {

void ViTConfig::validate() const {
  if (image_size == 0 || patch_size == 0 || channels == 0 || model_dim == 0 ||
      heads == 0) {
    throw UsageError("model config: dimensions must be positive");
  }
  if (image_size % patch_size != 0) {
    throw UsageError("model config: patch_size must divide image_size");
  }
  if (model_dim % heads != 0) {
    throw UsageError("model config: heads must divide model_dim");
  }
  if (proj_dim < 1 || proj_dim > seq_len()) {
    throw UsageError("model config: proj_dim must be in [1, seq_len]");
  }
}

}  // namespace splicedet::vit
