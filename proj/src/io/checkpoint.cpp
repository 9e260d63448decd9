// SPDX-License-Identifier: Apache-2.0
#include "splicedet/io/checkpoint.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "splicedet/errors.hpp"

namespace splicedet::io {

static_assert(std::numeric_limits<double>::is_iec559,
              "checkpoint format assumes IEEE-754 doubles");

namespace {

constexpr char kMagic[8] = {'S', 'P', 'L', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void put_f64(std::string& buf, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(buf, bits);
}

class Cursor {
 public:
  Cursor(const std::string& buf, const std::string& path)
      : buf_(buf), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(buf_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(buf_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
      throw DataError("truncated checkpoint: " + path_);
    }
  }
  const std::string& buf_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::string& buf, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()),
            static_cast<uInt>(n)));
}

}  // namespace

void save_checkpoint(const CheckpointData& data, const std::string& path) {
  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  put_u32(buf, kCheckpointVersion);
  put_u64(buf, data.meta.size());
  buf.append(data.meta);
  put_u32(buf, static_cast<std::uint32_t>(data.tensors.size()));
  for (const auto& nt : data.tensors) {
    put_u32(buf, static_cast<std::uint32_t>(nt.name.size()));
    buf.append(nt.name);
    put_u32(buf, static_cast<std::uint32_t>(nt.tensor.ndim()));
    for (std::size_t d : nt.tensor.shape()) put_u64(buf, d);
    put_u64(buf, nt.tensor.size());
    for (std::size_t i = 0; i < nt.tensor.size(); ++i) {
      put_f64(buf, nt.tensor[i]);
    }
  }
  put_u32(buf, crc_of(buf, buf.size()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("short checkpoint write: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 8) {
    throw DataError("truncated checkpoint: " + path);
  }
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  const std::uint32_t stored_crc = [&] {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(buf[buf.size() - 4 + i]))
           << (8 * i);
    }
    return v;
  }();
  if (crc_of(buf, buf.size() - 4) != stored_crc) {
    throw DataError("checkpoint checksum mismatch (corrupt file): " + path);
  }
  Cursor cur(buf, path);
  cur.bytes(sizeof(kMagic));
  const std::uint32_t version = cur.u32();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + "): " + path);
  }
  CheckpointData data;
  data.meta = cur.bytes(cur.u64());
  const std::uint32_t count = cur.u32();
  data.tensors.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    NamedTensor nt;
    nt.name = cur.bytes(cur.u32());
    const std::uint32_t ndim = cur.u32();
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) d = static_cast<std::size_t>(cur.u64());
    const std::uint64_t n = cur.u64();
    if (n != nn::shape_product(shape)) {
      throw DataError("checkpoint tensor '" + nt.name +
                      "' has inconsistent shape: " + path);
    }
    std::vector<double> values(n);
    for (auto& v : values) v = cur.f64();
    nt.tensor = nn::Tensor::from(shape, values);
    data.tensors.push_back(std::move(nt));
  }
  if (cur.pos() != buf.size() - 4) {
    throw DataError("checkpoint has trailing bytes: " + path);
  }
  return data;
}

}  // namespace splicedet::io
