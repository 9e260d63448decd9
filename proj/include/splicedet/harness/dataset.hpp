// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splicedet/image.hpp"
#include "splicedet/rng.hpp"

namespace splicedet::harness {

enum class BlendMode { kHard, kFeather };

struct SpliceSpec {
  int image_size = 256;
  std::vector<int> sizes = {16, 32, 64, 128, 256};  // object bbox max side
  double max_rotation_deg = 360.0;
  BlendMode blend = BlendMode::kHard;
  double contrast_shift = 0.45;  // brightness offset of the pasted object

  void validate() const;  // throws UsageError
};

// Multi-octave value noise mapped through a random two-color ramp; looks like
// smooth terrain and is deliberately easy for a small model to reconstruct.
Image make_pristine_texture(int size, Rng& rng);

struct SplicedSample {
  Image image;
  BinaryMask mask;  // exact pixel support of the pasted object
  int size = 0;     // requested bbox max side
};

// Pastes one rotated shape (square / ellipse / plane / cloud silhouette) cut
// from an independent texture, contrast-shifted away from the background.
// The mask's single component has bounding-box max side exactly sample.size.
SplicedSample make_spliced(Rng& rng, const SpliceSpec& spec);

struct DatasetPaths {
  std::vector<std::string> pristine;
  std::vector<std::string> spliced;
  std::vector<std::string> masks;
};

// Writes out_dir/{pristine,spliced,masks}; masks are named
// "<spliced stem>_mask.png". Deterministic for a given seed.
DatasetPaths generate_synthetic_dataset(const std::string& out_dir,
                                        std::uint64_t seed, int n_pristine,
                                        int n_spliced, const SpliceSpec& spec);

}  // namespace splicedet::harness
