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

#ifndef FQT_IMAGE_IO_HPP_
#define FQT_IMAGE_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#if defined(FQT_HAVE_PNG)
#include <png.h>
#endif

#include "fqt/error.hpp"
#include "fqt/tensor.hpp"

// 8-bit frames on disk, [0, 1] floats in memory. PPM (P6, and P5 on read)
// is always available; PNG when built with libpng.

namespace fqt {

inline constexpr bool kHavePng =
#if defined(FQT_HAVE_PNG)
    true;
#else
    false;
#endif

inline std::uint8_t to_u8(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

inline Tensor frame_from_u8(const std::vector<std::uint8_t>& interleaved, std::size_t channels,
                            std::size_t h, std::size_t w) {
  Tensor f({channels, h, w});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        f(c, y, x) = static_cast<float>(interleaved[(y * w + x) * channels + c]) / 255.0f;
      }
    }
  }
  return f;
}

inline std::vector<std::uint8_t> frame_to_u8(const Tensor& f) {
  const std::size_t channels = f.extent(0), h = f.extent(1), w = f.extent(2);
  std::vector<std::uint8_t> out(channels * h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) out[(y * w + x) * channels + c] = to_u8(f(c, y, x));
    }
  }
  return out;
}

namespace detail {

inline std::string next_pnm_token(std::istream& is) {
  std::string tok;
  char ch;
  while (is.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(is, ignored);
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      tok.push_back(ch);
      break;
    }
  }
  while (is.get(ch) && !std::isspace(static_cast<unsigned char>(ch))) tok.push_back(ch);
  return tok;
}

}  // namespace detail

inline Tensor read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  const std::string magic = detail::next_pnm_token(is);
  std::size_t channels = 0;
  if (magic == "P6") channels = 3;
  else if (magic == "P5") channels = 1;
  else throw FormatError(path.string() + " is not a binary PPM/PGM");
  const std::size_t w = std::stoul(detail::next_pnm_token(is));
  const std::size_t h = std::stoul(detail::next_pnm_token(is));
  const unsigned long maxval = std::stoul(detail::next_pnm_token(is));
  if (maxval != 255) throw FormatError(path.string() + ": only 8-bit PPM is supported");
  std::vector<std::uint8_t> pixels(w * h * channels);
  if (!is.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()))) {
    throw FormatError(path.string() + ": truncated pixel data");
  }
  return frame_from_u8(pixels, channels, h, w);
}

inline void write_ppm(const std::filesystem::path& path, const Tensor& frame) {
  if (frame.rank() != 3 || (frame.extent(0) != 3 && frame.extent(0) != 1)) {
    throw DimensionError("PPM output needs 1 or 3 channels, got " + shape_string(frame.shape()));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << (frame.extent(0) == 3 ? "P6" : "P5") << '\n'
     << frame.extent(2) << ' ' << frame.extent(1) << "\n255\n";
  const auto bytes = frame_to_u8(frame);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FormatError("failed writing " + path.string());
}

#if defined(FQT_HAVE_PNG)
inline Tensor read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw FormatError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    throw FormatError(path.string() + ": " + image.message);
  }
  return frame_from_u8(pixels, 3, image.height, image.width);
}

inline void write_png(const std::filesystem::path& path, const Tensor& frame) {
  if (frame.rank() != 3 || (frame.extent(0) != 3 && frame.extent(0) != 1)) {
    throw DimensionError("PNG output needs 1 or 3 channels, got " + shape_string(frame.shape()));
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.extent(2));
  image.height = static_cast<png_uint_32>(frame.extent(1));
  image.format = frame.extent(0) == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto bytes = frame_to_u8(frame);
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw FormatError(path.string() + ": " + image.message);
  }
}
#endif

inline Tensor read_frame(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".ppm" || ext == ".pgm") return read_ppm(path);
#if defined(FQT_HAVE_PNG)
  if (ext == ".png") return read_png(path);
#endif
  throw FormatError("unsupported frame format: " + path.string());
}

inline void write_frame(const std::filesystem::path& path, const Tensor& frame) {
  const auto ext = path.extension().string();
  if (ext == ".ppm" || ext == ".pgm") return write_ppm(path, frame);
#if defined(FQT_HAVE_PNG)
  if (ext == ".png") return write_png(path, frame);
#endif
  throw FormatError("unsupported frame format: " + path.string());
}

inline bool is_frame_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".ppm" || ext == ".pgm" || (kHavePng && ext == ".png");
}

// Frame files of a directory in lexicographic (frame number) order.
inline std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// frame_0001.ppm, frame_0002.ppm, ...
inline std::string frame_name(std::size_t index, std::string_view ext = ".ppm") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu", index);
  return std::string(buf) + std::string(ext);
}

}  // namespace fqt

#endif  // FQT_IMAGE_IO_HPP_
