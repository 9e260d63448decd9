// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "splicedet/image.hpp"
#include "splicedet/vit/model.hpp"

namespace splicedet::detect {

// 3×3 Laplacian [[0,1,0],[1,-4,1],[0,1,0]] per channel, mirrored borders.
Image laplacian(const Image& image);

// h = ½(meanC|I − Ir| + meanC|Id − Ird|) with Id the Laplacian response.
Heatmap residual_heatmap(const Image& image, const Image& recon);

enum class ThresholdKind { kFixed, kQuantile, kOtsu };

struct ThresholdPolicy {
  ThresholdKind kind = ThresholdKind::kQuantile;
  double value = 0.99;  // τ for kFixed, q for kQuantile, ignored for kOtsu
};

struct ThresholdResult {
  BinaryMask mask;
  double tau = 0.0;  // realized threshold; mask is h > tau
};

ThresholdResult threshold_mask(const Heatmap& h, const ThresholdPolicy& policy);

struct TileLayout {
  int tile = 0;
  int stride = 0;
  std::vector<std::pair<int, int>> origins;  // (y, x), row-major order

  // Regular grid of starts plus far-edge remainder tiles; every pixel is
  // covered at least once. Throws DataError when the image is smaller than
  // one tile (callers should pad or upscale first).
  static TileLayout cover(int height, int width, int tile, int stride);
};

Heatmap stitched_heatmap(const Image& image, const vit::ModelParams& params,
                         const vit::ViTConfig& cfg, int stride);

struct DetectionResult {
  Heatmap heatmap;
  BinaryMask mask;
  double tau = 0.0;
};

DetectionResult tile_and_detect(const Image& image,
                                const vit::ModelParams& params,
                                const vit::ViTConfig& cfg, int stride,
                                const ThresholdPolicy& policy);

}  // namespace splicedet::detect
