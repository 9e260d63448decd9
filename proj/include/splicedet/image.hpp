// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace splicedet {

// Channels-last raster of doubles, row-major. Pixel values are normally in
// [0,1] (8/16-bit inputs are mapped linearly on load).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0)
      : height(h),
        width(w),
        channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

// Per-pixel non-negative anomaly scores.
struct Heatmap {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Heatmap() = default;
  Heatmap(int h, int w, double fill = 0.0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int y, int x) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  double at(int y, int x) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t size() const { return data.size(); }
};

// Per-pixel boolean image; stored as 0/1 bytes.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int h, int w, bool fill = false)
      : height(h),
        width(w),
        data(static_cast<std::size_t>(h) * w, fill ? 1 : 0) {}

  bool at(int y, int x) const {
    return data[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int y, int x, bool v) {
    data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  bool in_bounds(int y, int x) const {
    return y >= 0 && y < height && x >= 0 && x < width;
  }
  std::size_t size() const { return data.size(); }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
  }
  bool operator==(const BinaryMask& o) const {
    return height == o.height && width == o.width && data == o.data;
  }
};

}  // namespace splicedet
