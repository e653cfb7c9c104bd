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

#ifndef FQT_DCT_HPP_
#define FQT_DCT_HPP_

#include <atomic>
#include <cmath>
#include <cstddef>
#include <algorithm>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fqt/error.hpp"
#include "fqt/tensor.hpp"

namespace fqt {

namespace testing_hooks {
// Multiplier applied to the AC normalization factor sqrt(2/B). Anything other
// than 1 breaks orthonormality; selftest uses it for fault injection.
inline std::atomic<double> dct_ac_scale{1.0};
}  // namespace testing_hooks

// Orthonormal DCT-II basis for blocks of size B:
// row u holds c(u) cos((2x + 1) u pi / 2B) for x in [0, B).
class DctBasis {
 public:
  explicit DctBasis(std::size_t block) : block_(block), table_(block * block) {
    if (block == 0) throw ParameterError("DCT block size must be >= 1");
    const double b = static_cast<double>(block);
    const double ac = std::sqrt(2.0 / b) * testing_hooks::dct_ac_scale.load();
    for (std::size_t u = 0; u < block; ++u) {
      const double cu = u == 0 ? std::sqrt(1.0 / b) : ac;
      for (std::size_t x = 0; x < block; ++x) {
        table_[u * block + x] =
            cu * std::cos((2.0 * static_cast<double>(x) + 1.0) *
                          static_cast<double>(u) * std::numbers::pi / (2.0 * b));
      }
    }
  }

  std::size_t block() const { return block_; }
  double operator()(std::size_t u, std::size_t x) const {
    return table_[u * block_ + x];
  }

  // In-place forward transform of one B x B tile stored row-major in `tile`
  // (separable: rows first, then columns).
  void forward(std::span<double> tile, std::span<double> scratch) const {
    const std::size_t b = block_;
    for (std::size_t x = 0; x < b; ++x) {
      for (std::size_t v = 0; v < b; ++v) {
        double acc = 0.0;
        for (std::size_t y = 0; y < b; ++y) acc += tile[x * b + y] * (*this)(v, y);
        scratch[x * b + v] = acc;
      }
    }
    for (std::size_t u = 0; u < b; ++u) {
      for (std::size_t v = 0; v < b; ++v) {
        double acc = 0.0;
        for (std::size_t x = 0; x < b; ++x) acc += (*this)(u, x) * scratch[x * b + v];
        tile[u * b + v] = acc;
      }
    }
  }

  void inverse(std::span<double> tile, std::span<double> scratch) const {
    const std::size_t b = block_;
    for (std::size_t u = 0; u < b; ++u) {
      for (std::size_t y = 0; y < b; ++y) {
        double acc = 0.0;
        for (std::size_t v = 0; v < b; ++v) acc += tile[u * b + v] * (*this)(v, y);
        scratch[u * b + y] = acc;
      }
    }
    for (std::size_t x = 0; x < b; ++x) {
      for (std::size_t y = 0; y < b; ++y) {
        double acc = 0.0;
        for (std::size_t u = 0; u < b; ++u) acc += (*this)(u, x) * scratch[u * b + y];
        tile[x * b + y] = acc;
      }
    }
  }

 private:
  std::size_t block_;
  std::vector<double> table_;
};

namespace detail {

template <typename T>
void require_square(const BasicTensor<T>& t, const char* op) {
  if (t.rank() != 2 || t.extent(0) != t.extent(1) || t.extent(0) == 0) {
    throw DimensionError(std::string(op) + " expects a non-empty square block, got " +
                         shape_string(t.shape()));
  }
}

template <typename T, bool kForward>
BasicTensor<T> transform_block(const BasicTensor<T>& in, const char* op) {
  require_square(in, op);
  const std::size_t b = in.extent(0);
  const DctBasis basis(b);
  std::vector<double> tile(in.data().begin(), in.data().end());
  std::vector<double> scratch(b * b);
  if constexpr (kForward) {
    basis.forward(tile, scratch);
  } else {
    basis.inverse(tile, scratch);
  }
  BasicTensor<T> out({b, b});
  for (std::size_t i = 0; i < tile.size(); ++i) out[i] = static_cast<T>(tile[i]);
  return out;
}

}  // namespace detail

// D(u, v) = c(u) c(v) sum_x sum_y P(x, y) cos((2x+1)u pi/2B) cos((2y+1)v pi/2B)
template <typename T>
BasicTensor<T> dct2d_block(const BasicTensor<T>& patch) {
  return detail::transform_block<T, true>(patch, "dct2d_block");
}

template <typename T>
BasicTensor<T> idct2d_block(const BasicTensor<T>& coeffs) {
  return detail::transform_block<T, false>(coeffs, "idct2d_block");
}

// Per-frame DCT representation: data is F x C x Hb x Wb with F = B*B, and
// frequency (u, v) stored at channel f = u * B + v.
template <typename T>
struct BasicSpectralMap {
  BasicTensor<T> data;
  std::size_t block = 8;

  std::size_t frequencies() const { return data.extent(0); }
  std::size_t channels() const { return data.extent(1); }
  std::size_t grid_height() const { return data.extent(2); }
  std::size_t grid_width() const { return data.extent(3); }

  void validate() const {
    if (data.rank() != 4) {
      throw DimensionError("spectral map must be F x C x Hb x Wb, got " +
                           shape_string(data.shape()));
    }
    if (data.extent(0) != block * block) {
      throw DimensionError("spectral map has " + std::to_string(data.extent(0)) +
                           " frequencies but block size " +
                           std::to_string(block) + " implies " +
                           std::to_string(block * block));
    }
  }

  static BasicSpectralMap zeros(std::size_t block, std::size_t channels,
                                std::size_t grid_h, std::size_t grid_w) {
    return {BasicTensor<T>({block * block, channels, grid_h, grid_w}), block};
  }

  friend bool operator==(const BasicSpectralMap&, const BasicSpectralMap&) = default;
};

using SpectralMap = BasicSpectralMap<float>;
using SpectralMap64 = BasicSpectralMap<double>;

struct PadRecord {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t padded_height = 0;
  std::size_t padded_width = 0;

  bool grew() const { return padded_height != height || padded_width != width; }
};

template <typename T>
struct PaddedFrame {
  BasicTensor<T> frame;
  PadRecord record;
};

inline std::size_t round_up(std::size_t value, std::size_t divisor) {
  return (value + divisor - 1) / divisor * divisor;
}

// Bottom/right edge replication up to the next multiple of `divisor`.
template <typename T>
PaddedFrame<T> pad_edge(const BasicTensor<T>& frame, std::size_t divisor) {
  if (divisor == 0) throw ParameterError("pad divisor must be >= 1");
  if (frame.rank() != 3) {
    throw DimensionError("pad_edge expects C x H x W, got " +
                         shape_string(frame.shape()));
  }
  const std::size_t channels = frame.extent(0);
  const std::size_t h = frame.extent(1), w = frame.extent(2);
  PadRecord rec{h, w, round_up(h, divisor), round_up(w, divisor)};
  if (!rec.grew()) return {frame, rec};
  BasicTensor<T> out({channels, rec.padded_height, rec.padded_width});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < rec.padded_height; ++y) {
      const std::size_t sy = std::min(y, h - 1);
      for (std::size_t x = 0; x < rec.padded_width; ++x) {
        out(c, y, x) = frame(c, sy, std::min(x, w - 1));
      }
    }
  }
  return {std::move(out), rec};
}

// Top-left crop of C x H x W to height x width.
template <typename T>
BasicTensor<T> crop(const BasicTensor<T>& frame, std::size_t height,
                    std::size_t width) {
  if (frame.rank() != 3 || frame.extent(1) < height || frame.extent(2) < width) {
    throw DimensionError("cannot crop " + shape_string(frame.shape()) + " to " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  if (frame.extent(1) == height && frame.extent(2) == width) return frame;
  const std::size_t channels = frame.extent(0);
  BasicTensor<T> out({channels, height, width});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) out(c, y, x) = frame(c, y, x);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> unpad(const BasicTensor<T>& frame, const PadRecord& rec) {
  return crop(frame, rec.height, rec.width);
}

template <typename T>
BasicSpectralMap<T> frame_to_spectral(const BasicTensor<T>& frame,
                                      std::size_t block) {
  if (block == 0) throw ParameterError("DCT block size must be >= 1");
  if (frame.rank() != 3 || frame.extent(1) % block || frame.extent(2) % block) {
    throw DimensionError("frame " + shape_string(frame.shape()) +
                         " is not tiled by " + std::to_string(block) + "x" +
                         std::to_string(block) + " blocks");
  }
  const std::size_t channels = frame.extent(0);
  const std::size_t gh = frame.extent(1) / block, gw = frame.extent(2) / block;
  auto map = BasicSpectralMap<T>::zeros(block, channels, gh, gw);
  const DctBasis basis(block);
  std::vector<double> tile(block * block), scratch(block * block);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ty = 0; ty < gh; ++ty) {
      for (std::size_t tx = 0; tx < gw; ++tx) {
        for (std::size_t x = 0; x < block; ++x) {
          for (std::size_t y = 0; y < block; ++y) {
            tile[x * block + y] = frame(c, ty * block + x, tx * block + y);
          }
        }
        basis.forward(tile, scratch);
        for (std::size_t f = 0; f < block * block; ++f) {
          map.data(f, c, ty, tx) = static_cast<T>(tile[f]);
        }
      }
    }
  }
  map.data.require_finite("frame_to_spectral");
  return map;
}

template <typename T>
BasicTensor<T> spectral_to_frame(const BasicSpectralMap<T>& map) {
  map.validate();
  const std::size_t block = map.block;
  const std::size_t channels = map.channels();
  const std::size_t gh = map.grid_height(), gw = map.grid_width();
  BasicTensor<T> frame({channels, gh * block, gw * block});
  const DctBasis basis(block);
  std::vector<double> tile(block * block), scratch(block * block);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ty = 0; ty < gh; ++ty) {
      for (std::size_t tx = 0; tx < gw; ++tx) {
        for (std::size_t f = 0; f < block * block; ++f) {
          tile[f] = map.data(f, c, ty, tx);
        }
        basis.inverse(tile, scratch);
        for (std::size_t x = 0; x < block; ++x) {
          for (std::size_t y = 0; y < block; ++y) {
            frame(c, ty * block + x, tx * block + y) =
                static_cast<T>(tile[x * block + y]);
          }
        }
      }
    }
  }
  frame.require_finite("spectral_to_frame");
  return frame;
}

}  // namespace fqt

#endif  // FQT_DCT_HPP_
