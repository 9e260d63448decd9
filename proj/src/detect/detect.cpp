// SPDX-License-Identifier: Apache-2.0
#include "splicedet/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "splicedet/errors.hpp"

namespace splicedet::detect {

namespace {

// reflect-101: index -1 maps to 1, index H maps to H-2 (edge not duplicated)
int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace

Image laplacian(const Image& image) {
  if (image.height < 3 || image.width < 3) {
    throw DataError("laplacian: image must be at least 3x3");
  }
  Image out(image.height, image.width, image.channels);
  for (int y = 0; y < image.height; ++y) {
    const int yu = mirror(y - 1, image.height);
    const int yd = mirror(y + 1, image.height);
    for (int x = 0; x < image.width; ++x) {
      const int xl = mirror(x - 1, image.width);
      const int xr = mirror(x + 1, image.width);
      for (int c = 0; c < image.channels; ++c) {
        out.at(y, x, c) = image.at(yu, x, c) + image.at(yd, x, c) +
                          image.at(y, xl, c) + image.at(y, xr, c) -
                          4.0 * image.at(y, x, c);
      }
    }
  }
  return out;
}

Heatmap residual_heatmap(const Image& image, const Image& recon) {
  if (!image.same_shape(recon)) {
    throw std::invalid_argument("residual_heatmap: shape mismatch");
  }
  const Image id = laplacian(image);
  const Image rd = laplacian(recon);
  Heatmap h(image.height, image.width);
  const double inv_c = 1.0 / static_cast<double>(image.channels);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      double direct = 0.0, lap = 0.0;
      for (int c = 0; c < image.channels; ++c) {
        direct += std::abs(image.at(y, x, c) - recon.at(y, x, c));
        lap += std::abs(id.at(y, x, c) - rd.at(y, x, c));
      }
      h.at(y, x) = 0.5 * (direct + lap) * inv_c;
    }
  }
  return h;
}

namespace {

double quantile_nearest_rank(const std::vector<double>& values, double q) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const long long rank = static_cast<long long>(std::ceil(q * n)) - 1;
  const long long idx = std::min<long long>(
      static_cast<long long>(sorted.size()) - 1, std::max<long long>(0, rank));
  return sorted[static_cast<std::size_t>(idx)];
}

double otsu_threshold(const std::vector<double>& values) {
  constexpr int kBins = 256;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) return lo;  // flat heatmap: strict > keeps the mask empty
  const double scale = kBins / (hi - lo);
  std::vector<std::size_t> hist(kBins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) * scale);
    b = std::min(kBins - 1, std::max(0, b));
    ++hist[static_cast<std::size_t>(b)];
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += b * static_cast<double>(hist[b]);
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_t = 0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += t * static_cast<double>(hist[t]);
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return lo + (hi - lo) * static_cast<double>(best_t + 1) / kBins;
}

}  // namespace

ThresholdResult threshold_mask(const Heatmap& h, const ThresholdPolicy& policy) {
  if (h.size() == 0) throw DataError("threshold_mask: empty heatmap");
  double tau = 0.0;
  switch (policy.kind) {
    case ThresholdKind::kFixed:
      tau = policy.value;
      break;
    case ThresholdKind::kQuantile:
      if (policy.value < 0.0 || policy.value > 1.0) {
        throw UsageError("threshold_mask: quantile must be in [0,1]");
      }
      tau = quantile_nearest_rank(h.data, policy.value);
      break;
    case ThresholdKind::kOtsu:
      tau = otsu_threshold(h.data);
      break;
  }
  ThresholdResult res{BinaryMask(h.height, h.width), tau};
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    res.mask.data[i] = h.data[i] > tau ? 1 : 0;
  }
  return res;
}

namespace {

std::vector<int> axis_starts(int extent, int tile, int stride) {
  std::vector<int> out;
  for (int s = 0; s + tile <= extent; s += stride) out.push_back(s);
  if (out.empty() || out.back() + tile < extent) out.push_back(extent - tile);
  return out;
}

}  // namespace

TileLayout TileLayout::cover(int height, int width, int tile, int stride) {
  if (tile <= 0 || stride <= 0) {
    throw UsageError("tile layout: tile and stride must be positive");
  }
  if (height < tile || width < tile) {
    throw DataError("image is smaller than one " + std::to_string(tile) +
                    "px tile; pad it before detection");
  }
  TileLayout layout;
  layout.tile = tile;
  layout.stride = stride;
  for (int y : axis_starts(height, tile, stride)) {
    for (int x : axis_starts(width, tile, stride)) {
      layout.origins.emplace_back(y, x);
    }
  }
  return layout;
}

Heatmap stitched_heatmap(const Image& image, const vit::ModelParams& params,
                         const vit::ViTConfig& cfg, int stride) {
  if (image.channels != static_cast<int>(cfg.channels)) {
    throw DataError("detect: image has " + std::to_string(image.channels) +
                    " channels but the model expects " +
                    std::to_string(cfg.channels));
  }
  const int tile = static_cast<int>(cfg.image_size);
  const TileLayout layout =
      TileLayout::cover(image.height, image.width, tile, stride);
  std::vector<double> sum(image.pixel_count(), 0.0);
  std::vector<double> count(image.pixel_count(), 0.0);
  Image patch(tile, tile, image.channels);
  for (const auto& [oy, ox] : layout.origins) {
    for (int y = 0; y < tile; ++y) {
      for (int x = 0; x < tile; ++x) {
        for (int c = 0; c < image.channels; ++c) {
          patch.at(y, x, c) = image.at(oy + y, ox + x, c);
        }
      }
    }
    const Image recon = vit::reconstruct_image(patch, params, cfg);
    const Heatmap h = residual_heatmap(patch, recon);
    for (int y = 0; y < tile; ++y) {
      for (int x = 0; x < tile; ++x) {
        const std::size_t idx =
            static_cast<std::size_t>(oy + y) * image.width + (ox + x);
        sum[idx] += h.at(y, x);
        count[idx] += 1.0;
      }
    }
  }
  Heatmap out(image.height, image.width);
  for (std::size_t i = 0; i < sum.size(); ++i) out.data[i] = sum[i] / count[i];
  return out;
}

DetectionResult tile_and_detect(const Image& image,
                                const vit::ModelParams& params,
                                const vit::ViTConfig& cfg, int stride,
                                const ThresholdPolicy& policy) {
  Heatmap h = stitched_heatmap(image, params, cfg, stride);
  ThresholdResult t = threshold_mask(h, policy);
  return {std::move(h), std::move(t.mask), t.tau};
}

}  // namespace splicedet::detect
