// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "splicedet/image.hpp"

namespace splicedet::io {

// 8- or 16-bit PNG, scaled to [0,1]. Gray maps to one channel, RGB/RGBA to
// three (alpha dropped). Palette images are expanded.
Image load_image(const std::string& path);

// 8-bit PNG, gray for 1-channel images, RGB for 3-channel.
void save_image_png8(const Image& image, const std::string& path);

// 16-bit gray PNG, min-max scaled; the scale is recorded in "<path>.meta"
// (min=, max= lines) so the values can be recovered. extra_meta lines are
// appended verbatim.
void save_heatmap_png16(const Heatmap& h, const std::string& path,
                        const std::string& extra_meta = "");
Heatmap load_heatmap_png16(const std::string& path);

// Masks travel either as 1-bit portable bitmaps (P4) or as 0/255 gray PNG.
// load_mask sniffs the magic bytes.
void save_mask_pbm(const BinaryMask& m, const std::string& path);
void save_mask_png(const BinaryMask& m, const std::string& path);
BinaryMask load_mask(const std::string& path);

}  // namespace splicedet::io
