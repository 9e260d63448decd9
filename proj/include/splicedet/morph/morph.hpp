// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "splicedet/image.hpp"

namespace splicedet::morph {

// Boolean grid with an explicit anchor. Odd sides anchor at the true center;
// the 2×2 element used by the first post-processing variant anchors at the
// top-left of the four cells nearest the center (floor((side-1)/2) per axis).
struct StructuringElement {
  int height = 0;
  int width = 0;
  int anchor_y = 0;
  int anchor_x = 0;
  std::vector<std::uint8_t> cells;

  bool at(int y, int x) const {
    return cells[static_cast<std::size_t>(y) * width + x] != 0;
  }
  // offsets of true cells relative to the anchor
  std::vector<std::pair<int, int>> offsets() const;
  StructuringElement reflected() const;  // 180° rotation about the anchor
  void validate() const;

  static StructuringElement square(int side);
  // true exactly where a < Chebyshev distance from center <= b
  static StructuringElement chebyshev_ring(int a, int b);
};

// Out-of-bounds pixels count as background for every operation here.
BinaryMask erode(const BinaryMask& m, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& m, const StructuringElement& se);
BinaryMask open(const BinaryMask& m, const StructuringElement& se);
BinaryMask close(const BinaryMask& m, const StructuringElement& se);

// Background regions not reachable from the border (4-connectivity) become
// foreground.
BinaryMask fill_holes(const BinaryMask& m);

struct ComponentStats {
  std::int32_t label = 0;  // 1-based
  std::size_t area = 0;
  int min_y = 0, min_x = 0, max_y = 0, max_x = 0;
  int chebyshev_diameter() const {
    return std::max(max_y - min_y, max_x - min_x);
  }
  int bbox_max_side() const {
    return std::max(max_y - min_y, max_x - min_x) + 1;
  }
};

struct Components {
  std::vector<std::int32_t> labels;  // H×W, 0 = background
  std::vector<ComponentStats> stats;
};

// 8-connectivity, labels assigned in raster discovery order.
Components connected_components(const BinaryMask& m);

StructuringElement make_erode_isolated_element(int a, int b);

// Keeps a pixel only if some other foreground pixel sits in its (a, b]
// Chebyshev ring: m AND dilate(m, ring). Small isolated blobs vanish.
BinaryMask erode_isolated(const BinaryMask& m, int a, int b);

// 2×2 opening, 2×2 closing, hole filling.
BinaryMask postprocess_v1(const BinaryMask& m);

struct ErodeIsolatedSpec {
  int a = 0;
  int b = 0;
};

struct PostProcessConfig {
  StructuringElement closing = StructuringElement::square(3);
  bool fill_holes = true;
  std::vector<ErodeIsolatedSpec> schedule = {{1, 2}, {1, 3}, {2, 4}, {3, 6}, {5, 8}};
  std::size_t max_passes = 0;  // 0 picks schedule.size()

  std::size_t pass_cap() const {
    return max_passes == 0 ? schedule.size() : max_passes;
  }
  void validate() const;
};

struct PostProcessResult {
  BinaryMask mask;
  std::size_t passes = 0;  // full schedule passes executed
};

// Closing, optional hole fill, then repeated passes of the erode-isolated
// schedule until a pass changes nothing or the cap is hit.
PostProcessResult postprocess_v2(const BinaryMask& m,
                                 const PostProcessConfig& cfg);

}  // namespace splicedet::morph
