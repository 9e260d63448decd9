// SPDX-License-Identifier: Apache-2.0
#include "splicedet/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "splicedet/errors.hpp"

namespace splicedet::io {

namespace {

struct PngReader {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriter {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngPixels {
  png_uint_32 height = 0, width = 0;
  int channels = 0, bit_depth = 0;
  std::vector<double> data;  // channels-last, [0,1]
};

// Everything that can longjmp stays inside here; the RAII holder's members
// are set before setjmp so cleanup is safe on both paths.
PngPixels read_png(const std::string& path) {
  PngReader r;
  r.fp = std::fopen(path.c_str(), "rb");
  if (!r.fp) throw DataError("cannot open " + path);
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
  if (r.png) r.info = png_create_info_struct(r.png);
  if (!r.png || !r.info) throw DataError("PNG decoder init failed");
  if (setjmp(png_jmpbuf(r.png))) {
    throw DataError("failed to decode PNG: " + path);
  }
  png_init_io(r.png, r.fp);
  png_read_png(r.png, r.info, PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND,
               nullptr);
  PngPixels out;
  out.height = png_get_image_height(r.png, r.info);
  out.width = png_get_image_width(r.png, r.info);
  out.channels = png_get_channels(r.png, r.info);
  out.bit_depth = png_get_bit_depth(r.png, r.info);
  if (out.height == 0 || out.width == 0) {
    throw DataError("empty PNG: " + path);
  }
  if (out.bit_depth != 8 && out.bit_depth != 16) {
    throw DataError("unsupported PNG bit depth in " + path);
  }
  png_bytepp rows = png_get_rows(r.png, r.info);
  const double denom = out.bit_depth == 8 ? 255.0 : 65535.0;
  out.data.resize(static_cast<std::size_t>(out.height) * out.width *
                  out.channels);
  std::size_t idx = 0;
  for (png_uint_32 y = 0; y < out.height; ++y) {
    const png_bytep row = rows[y];
    for (png_uint_32 x = 0; x < static_cast<png_uint_32>(out.width) *
                                    out.channels;
         ++x) {
      if (out.bit_depth == 8) {
        out.data[idx++] = row[x] / denom;
      } else {
        const unsigned hi = row[2 * x], lo = row[2 * x + 1];  // network order
        out.data[idx++] = ((hi << 8) | lo) / denom;
      }
    }
  }
  return out;
}

void write_png(const std::string& path, int height, int width, int channels,
               int bit_depth, const std::vector<png_byte>& packed) {
  PngWriter w;
  w.fp = std::fopen(path.c_str(), "wb");
  if (!w.fp) throw DataError("cannot write " + path);
  w.png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (w.png) w.info = png_create_info_struct(w.png);
  if (!w.png || !w.info) throw DataError("PNG encoder init failed");
  if (setjmp(png_jmpbuf(w.png))) {
    throw DataError("failed to encode PNG: " + path);
  }
  png_init_io(w.png, w.fp);
  const int color =
      channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  const std::size_t stride = static_cast<std::size_t>(width) * channels *
                             (bit_depth / 8);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(packed.data() + y * stride);
  }
  png_set_rows(w.png, w.info, rows.data());
  png_write_png(w.png, w.info, PNG_TRANSFORM_IDENTITY, nullptr);
}

png_byte to_byte(double v) {
  const double s = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<png_byte>(s);
}

}  // namespace

Image load_image(const std::string& path) {
  const PngPixels px = read_png(path);
  const int out_channels = px.channels >= 3 ? 3 : 1;
  Image img(static_cast<int>(px.height), static_cast<int>(px.width),
            out_channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::size_t src =
          (static_cast<std::size_t>(y) * px.width + x) * px.channels;
      for (int c = 0; c < out_channels; ++c) {
        img.at(y, x, c) = px.data[src + c];
      }
    }
  }
  return img;
}

void save_image_png8(const Image& image, const std::string& path) {
  if (image.channels != 1 && image.channels != 3) {
    throw std::invalid_argument("save_image_png8: need 1 or 3 channels");
  }
  std::vector<png_byte> packed(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    packed[i] = to_byte(image.data[i]);
  }
  write_png(path, image.height, image.width, image.channels, 8, packed);
}

void save_heatmap_png16(const Heatmap& h, const std::string& path,
                        const std::string& extra_meta) {
  if (h.size() == 0) throw std::invalid_argument("empty heatmap");
  const auto [lo_it, hi_it] = std::minmax_element(h.data.begin(), h.data.end());
  const double lo = *lo_it, hi = *hi_it;
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::vector<png_byte> packed(h.data.size() * 2);
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    const auto v =
        static_cast<unsigned>(std::lround((h.data[i] - lo) * scale));
    packed[2 * i] = static_cast<png_byte>(v >> 8);
    packed[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
  }
  write_png(path, h.height, h.width, 1, 16, packed);
  std::ofstream meta(path + ".meta");
  if (!meta) throw DataError("cannot write " + path + ".meta");
  meta.precision(std::numeric_limits<double>::max_digits10);
  meta << "min=" << lo << "\nmax=" << hi << "\n";
  if (!extra_meta.empty()) {
    meta << extra_meta;
    if (extra_meta.back() != '\n') meta << "\n";
  }
}

Heatmap load_heatmap_png16(const std::string& path) {
  const PngPixels px = read_png(path);
  if (px.channels != 1 || px.bit_depth != 16) {
    throw DataError("expected a 16-bit gray heatmap PNG: " + path);
  }
  std::ifstream meta(path + ".meta");
  if (!meta) throw DataError("missing heatmap sidecar: " + path + ".meta");
  double lo = 0.0, hi = 0.0;
  bool have_lo = false, have_hi = false;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line.substr(4));
    if (line.rfind("min=", 0) == 0) {
      have_lo = static_cast<bool>(ls >> lo);
    } else if (line.rfind("max=", 0) == 0) {
      have_hi = static_cast<bool>(ls >> hi);
    }
  }
  if (!have_lo || !have_hi) {
    throw DataError("heatmap sidecar lacks min/max: " + path + ".meta");
  }
  Heatmap h(static_cast<int>(px.height), static_cast<int>(px.width));
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    h.data[i] = lo + px.data[i] * (hi - lo);
  }
  return h;
}

void save_mask_pbm(const BinaryMask& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "P4\n" << m.width << " " << m.height << "\n";
  const int stride = (m.width + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(stride));
  for (int y = 0; y < m.height; ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < m.width; ++x) {
      if (m.at(y, x)) row[x / 8] |= static_cast<char>(0x80 >> (x % 8));
    }
    out.write(row.data(), stride);
  }
  if (!out) throw DataError("short write: " + path);
}

namespace {

BinaryMask load_mask_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P4") throw DataError("not a P4 bitmap: " + path);
  auto next_int = [&](int& value) {
    // skip whitespace and '#' comment lines
    for (;;) {
      const int c = in.peek();
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    if (!(in >> value) || value <= 0) {
      throw DataError("bad bitmap header: " + path);
    }
  };
  int width = 0, height = 0;
  next_int(width);
  next_int(height);
  in.get();  // single whitespace byte before the raster
  BinaryMask m(height, width);
  const int stride = (width + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(stride));
  for (int y = 0; y < height; ++y) {
    if (!in.read(row.data(), stride)) {
      throw DataError("truncated bitmap: " + path);
    }
    for (int x = 0; x < width; ++x) {
      m.set(y, x, (row[x / 8] & (0x80 >> (x % 8))) != 0);
    }
  }
  return m;
}

}  // namespace

void save_mask_png(const BinaryMask& m, const std::string& path) {
  std::vector<png_byte> packed(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    packed[i] = m.data[i] ? 255 : 0;
  }
  write_png(path, m.height, m.width, 1, 8, packed);
}

BinaryMask load_mask(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open " + path);
  char head[2] = {0, 0};
  probe.read(head, 2);
  probe.close();
  if (head[0] == 'P' && head[1] == '4') return load_mask_pbm(path);
  const PngPixels px = read_png(path);
  BinaryMask m(static_cast<int>(px.height), static_cast<int>(px.width));
  for (std::size_t p = 0; p < m.data.size(); ++p) {
    m.data[p] = px.data[p * px.channels] > 0.5 ? 1 : 0;
  }
  return m;
}

}  // namespace splicedet::io
