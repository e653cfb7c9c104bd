// Copyright 2026 The fqt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FQT_TENSOR_IO_HPP_
#define FQT_TENSOR_IO_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fqt/error.hpp"
#include "fqt/tensor.hpp"

// FQT1 tensor dump:
//   bytes 0..3   "FQT1"
//   u32          rank
//   rank x u32   extents
//   f32 payload, row-major
// All integers and floats are little-endian.

namespace fqt {

inline constexpr std::array<char, 4> kTensorMagic = {'F', 'Q', 'T', '1'};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError("truncated FQT1 stream");
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

// Values are narrowed to f32 on write regardless of T.
template <typename T>
void write_tensor(std::ostream& os, const BasicTensor<T>& t) {
  os.write(kTensorMagic.data(), kTensorMagic.size());
  detail::put_u32(os, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape()) {
    detail::put_u32(os, static_cast<std::uint32_t>(e));
  }
  for (T v : t.data()) {
    detail::put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!os) throw FormatError("failed writing FQT1 tensor");
}

inline Tensor read_tensor(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kTensorMagic) {
    throw FormatError("missing FQT1 magic");
  }
  const std::uint32_t rank = detail::get_u32(is);
  if (rank > 16) throw FormatError("implausible FQT1 rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& e : shape) e = detail::get_u32(is);
  Tensor t(shape);
  for (auto& v : t.data()) {
    v = std::bit_cast<float>(detail::get_u32(is));
  }
  return t;
}

template <typename T>
void save_tensor(const std::filesystem::path& path, const BasicTensor<T>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_tensor(os, t);
}

inline Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_tensor(is);
}

}  // namespace fqt

#endif  // FQT_TENSOR_IO_HPP_
