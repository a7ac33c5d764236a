/* Copyright 2026 The Neural Pathways Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "np/weights_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

namespace np {
namespace {

constexpr char kMagic[4] = {'N', 'P', 'W', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("weights file is truncated");
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large inputs in pieces
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto len = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, len);
    pos += len;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw FormatError(std::string(what) + " does not fit the weights format");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const MlpParams& params) {
  validate(params);
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kWeightsFormatVersion);
  w.u8(static_cast<std::uint8_t>(params.activation));
  w.u32(checked_u32(params.layers.size(), "layer count"));
  for (const auto& layer : params.layers) {
    w.u32(checked_u32(layer.in_dim(), "layer width"));
    w.u32(checked_u32(layer.out_dim(), "layer width"));
    w.u8(layer.slopes ? 1 : 0);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.f64(layer.weight(r, c));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) w.f64(layer.bias[r]);
    if (layer.slopes)
      for (Eigen::Index r = 0; r < layer.slopes->size(); ++r) w.f64((*layer.slopes)[r]);
  }
  auto& bytes = w.bytes();
  const std::uint32_t crc = crc32_of(bytes);
  w.u32(crc);
  return std::move(bytes);
}

MlpParams decode_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a weights file (bad magic)");
  if (bytes.size() < 4 + 4 + 1 + 4 + 4) throw FormatError("weights file is truncated");
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (crc32_of(body) != tail.u32()) throw FormatError("weights file checksum mismatch");

  Reader r(body);
  r.need(4);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kWeightsFormatVersion)
    throw FormatError("unsupported weights format version " + std::to_string(version));
  const std::uint8_t tag = r.u8();
  if (tag > static_cast<std::uint8_t>(Activation::SuperExpressive))
    throw FormatError("unknown activation tag " + std::to_string(tag));
  const std::uint32_t count = r.u32();
  if (count == 0) throw FormatError("weights file has no layers");

  std::vector<std::size_t> dims;
  std::vector<LayerParams> layers;
  for (std::uint32_t l = 0; l < count; ++l) {
    const std::uint32_t d_in = r.u32();
    const std::uint32_t d_out = r.u32();
    const std::uint8_t has_slopes = r.u8();
    if (d_in == 0 || d_out == 0 || has_slopes > 1) throw FormatError("corrupt layer header");
    const std::uint64_t scalars =
        static_cast<std::uint64_t>(d_in) * d_out + d_out + (has_slopes ? d_out : 0);
    if (scalars > r.remaining() / 8) throw FormatError("weights file is truncated");
    LayerParams layer;
    layer.weight.resize(d_out, d_in);
    for (std::uint32_t i = 0; i < d_out; ++i)
      for (std::uint32_t j = 0; j < d_in; ++j) layer.weight(i, j) = r.f64();
    layer.bias.resize(d_out);
    for (std::uint32_t i = 0; i < d_out; ++i) layer.bias[i] = r.f64();
    if (has_slopes) {
      Vector s(d_out);
      for (std::uint32_t i = 0; i < d_out; ++i) s[i] = r.f64();
      layer.slopes = std::move(s);
    }
    if (l == 0) dims.push_back(d_in);
    else if (dims.back() != d_in) throw FormatError("layer widths do not chain");
    dims.push_back(d_out);
    layers.push_back(std::move(layer));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in weights file");

  MlpParams params{MultiIndex(std::move(dims)), std::move(layers), static_cast<Activation>(tag)};
  try {
    validate(params);
  } catch (const Error& e) {
    throw FormatError(std::string("weights file holds an invalid network: ") + e.what());
  }
  return params;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void save_weights(const MlpParams& params, const std::filesystem::path& path) {
  write_file_bytes(path, encode_weights(params));
}

MlpParams load_weights(const std::filesystem::path& path) {
  try {
    return decode_weights(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace np
