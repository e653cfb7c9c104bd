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

#ifndef FQT_COMPRESSOR_HPP_
#define FQT_COMPRESSOR_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/numerics.hpp"
#include "fqt/tensor.hpp"

namespace fqt {

struct QualityPreset {
  std::string_view name;
  double q;
};

// Mnemonic labels only; the strengths are not calibrated against any codec.
inline constexpr std::array<QualityPreset, 3> kQualityPresets = {{
    {"crf15-like", 1.0 / 255.0},
    {"crf25-like", 6.0 / 255.0},
    {"crf35-like", 20.0 / 255.0},
}};

// Accepts a preset name or a plain non-negative number.
inline std::optional<double> parse_quality(std::string_view text) {
  for (const auto& p : kQualityPresets) {
    if (p.name == text) return p.q;
  }
  try {
    std::size_t used = 0;
    const double q = std::stod(std::string(text), &used);
    if (used == text.size() && q >= 0 && std::isfinite(q)) return q;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

struct DegradeConfig {
  std::size_t scale = 4;
  double q = 0.0;
  std::size_t block = 8;

  void validate() const {
    if (scale == 0) throw ParameterError("downsample scale must be >= 1");
    if (!(q >= 0) || !std::isfinite(q)) throw ParameterError("quantization strength must be >= 0");
    if (block == 0) throw ParameterError("block size must be >= 1");
  }
};

// Step for coefficient (u, v); grows with strength and with frequency.
inline double quantization_step(std::size_t u, std::size_t v, double q) {
  return q * (1.0 + static_cast<double>(u + v));
}

// Blockwise DCT quantization: every coefficient is rounded to a multiple of
// its step, then the tile is transformed back. q = 0 is a plain roundtrip.
template <typename T>
BasicTensor<T> quantize_compress(const BasicTensor<T>& frame, double q, std::size_t block) {
  DegradeConfig{1, q, block}.validate();
  if (frame.rank() != 3) {
    throw DimensionError("quantize_compress expects C x H x W, got " + shape_string(frame.shape()));
  }
  auto padded = pad_edge(frame, block);
  BasicTensor<T>& img = padded.frame;
  const DctBasis basis(block);
  std::vector<double> tile(block * block), scratch(block * block);
  const std::size_t gh = img.extent(1) / block, gw = img.extent(2) / block;
  for (std::size_t c = 0; c < img.extent(0); ++c) {
    for (std::size_t ty = 0; ty < gh; ++ty) {
      for (std::size_t tx = 0; tx < gw; ++tx) {
        for (std::size_t x = 0; x < block; ++x) {
          for (std::size_t y = 0; y < block; ++y) {
            tile[x * block + y] = img(c, ty * block + x, tx * block + y);
          }
        }
        basis.forward(tile, scratch);
        if (q > 0) {
          for (std::size_t u = 0; u < block; ++u) {
            for (std::size_t v = 0; v < block; ++v) {
              const double s = quantization_step(u, v, q);
              double& d = tile[u * block + v];
              d = std::round(d / s) * s;
            }
          }
        }
        basis.inverse(tile, scratch);
        for (std::size_t x = 0; x < block; ++x) {
          for (std::size_t y = 0; y < block; ++y) {
            img(c, ty * block + x, tx * block + y) = static_cast<T>(tile[x * block + y]);
          }
        }
      }
    }
  }
  return unpad(img, padded.record);
}

// Compressed LR sequence: bicubic downsampling by `scale`, then quantization.
template <typename T>
std::vector<BasicTensor<T>> degrade_sequence(const std::vector<BasicTensor<T>>& hr,
                                             const DegradeConfig& cfg) {
  cfg.validate();
  std::vector<BasicTensor<T>> out;
  out.reserve(hr.size());
  for (const auto& frame : hr) {
    if (frame.rank() != 3 || frame.extent(1) % cfg.scale || frame.extent(2) % cfg.scale) {
      throw DimensionError("HR frame " + shape_string(frame.shape()) +
                           " is not divisible by scale " + std::to_string(cfg.scale));
    }
    const BasicTensor<T> lr =
        bicubic_resize(frame, ScaleFactor{1, static_cast<int>(cfg.scale)});
    out.push_back(quantize_compress(lr, cfg.q, cfg.block));
  }
  return out;
}

}  // namespace fqt

#endif  // FQT_COMPRESSOR_HPP_
