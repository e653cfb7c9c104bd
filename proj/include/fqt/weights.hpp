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

#ifndef FQT_WEIGHTS_HPP_
#define FQT_WEIGHTS_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fqt/error.hpp"
#include "fqt/random.hpp"
#include "fqt/tensor.hpp"
#include "fqt/tensor_io.hpp"

namespace fqt {

// Residual two-layer feed-forward block applied to token vectors:
// out = x + w2 relu(w1 x + b1) + b2.
template <typename T>
struct BasicFfnWeights {
  BasicTensor<T> w1;  // hidden x dim
  BasicTensor<T> b1;  // hidden
  BasicTensor<T> w2;  // dim x hidden
  BasicTensor<T> b2;  // dim

  std::size_t dim() const { return w1.extent(1); }
  std::size_t hidden() const { return w1.extent(0); }

  static BasicFfnWeights zeros(std::size_t dim, std::size_t hidden) {
    return {BasicTensor<T>({hidden, dim}), BasicTensor<T>({hidden}),
            BasicTensor<T>({dim, hidden}), BasicTensor<T>({dim})};
  }

  void validate() const {
    const std::size_t d = w1.rank() == 2 ? w1.extent(1) : 0;
    const std::size_t h = w1.rank() == 2 ? w1.extent(0) : 0;
    if (d == 0 || h == 0 || b1.shape() != Shape{h} || w2.shape() != Shape{d, h} ||
        b2.shape() != Shape{d}) {
      throw DimensionError("inconsistent FFN weights: w1 " +
                           shape_string(w1.shape()) + ", w2 " +
                           shape_string(w2.shape()));
    }
  }
};

// Optional linear maps applied to query, key and value vectors before
// attention. Absent projections mean the identity.
template <typename T>
struct BasicProjections {
  BasicTensor<T> query;  // dim x dim
  BasicTensor<T> key;
  BasicTensor<T> value;
};

template <typename T>
struct BasicAttentionWeights {
  std::optional<BasicProjections<T>> projections;
  BasicFfnWeights<T> ffn;
  // Fusion: width x (2 width), where width = F * C is the per-position
  // feature length of a spectral map. Left half multiplies the first
  // argument of the fusion, right half the second.
  BasicTensor<T> fusion;
};

using FfnWeights = BasicFfnWeights<float>;
using AttentionWeights = BasicAttentionWeights<float>;

// Upsampling network: bicubic x alpha followed by a residual 3x3 convolution
// (C x C x 3 x 3). A zero kernel makes it exact bicubic.
struct UpsamplerWeights {
  Tensor kernel;
};

struct ModelWeights {
  UpsamplerWeights upsampler;
  AttentionWeights attention;
};

// Extents that determine every weight shape.
struct WeightDims {
  std::size_t channels = 3;
  std::size_t block = 8;
  std::size_t kernel = 8;
  std::size_t ffn_hidden = 64;
  bool projections = false;

  std::size_t token_dim() const { return channels * kernel * kernel; }
  std::size_t fusion_width() const { return block * block * channels; }
};

namespace detail {

inline Tensor scaled_normal(Shape shape, Rng& rng, double stddev) {
  return random_normal<float>(std::move(shape), rng, stddev);
}

}  // namespace detail

// Seeded toy parameters. Biases start at zero so that an all-zero input
// stays zero through every stage.
inline ModelWeights seeded_weights(const WeightDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  ModelWeights w;
  const std::size_t c = dims.channels;
  w.upsampler.kernel = detail::scaled_normal({c, c, 3, 3}, rng, 0.02);

  const std::size_t d = dims.token_dim();
  const std::size_t h = dims.ffn_hidden;
  auto& att = w.attention;
  att.ffn = FfnWeights::zeros(d, h);
  att.ffn.w1 = detail::scaled_normal({h, d}, rng, 1.0 / std::sqrt(double(d)));
  att.ffn.w2 = detail::scaled_normal({d, h}, rng, 0.1 / std::sqrt(double(h)));

  if (dims.projections) {
    const double s = 1.0 / std::sqrt(double(d));
    att.projections = BasicProjections<float>{
        detail::scaled_normal({d, d}, rng, s), detail::scaled_normal({d, d}, rng, s),
        detail::scaled_normal({d, d}, rng, s)};
  }

  // Fusion starts near [I/2 | -I/2] plus a small random mixing term, so the
  // untrained output rDCT(fuse(P, D) + D) is roughly the mean of P and D.
  const std::size_t width = dims.fusion_width();
  att.fusion = detail::scaled_normal({width, 2 * width}, rng,
                                     0.02 / std::sqrt(double(width)));
  for (std::size_t r = 0; r < width; ++r) {
    att.fusion(r, r) += 0.5f;
    att.fusion(r, width + r) -= 0.5f;
  }
  return w;
}

// A weight dump is a directory of FQT1 files, one per parameter tensor.
inline void save_weights(const std::filesystem::path& dir, const ModelWeights& w) {
  std::filesystem::create_directories(dir);
  save_tensor(dir / "upsampler_kernel.fqt", w.upsampler.kernel);
  save_tensor(dir / "ffn_w1.fqt", w.attention.ffn.w1);
  save_tensor(dir / "ffn_b1.fqt", w.attention.ffn.b1);
  save_tensor(dir / "ffn_w2.fqt", w.attention.ffn.w2);
  save_tensor(dir / "ffn_b2.fqt", w.attention.ffn.b2);
  save_tensor(dir / "fusion.fqt", w.attention.fusion);
  if (w.attention.projections) {
    save_tensor(dir / "proj_query.fqt", w.attention.projections->query);
    save_tensor(dir / "proj_key.fqt", w.attention.projections->key);
    save_tensor(dir / "proj_value.fqt", w.attention.projections->value);
  }
}

inline ModelWeights load_weights(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("weight dump " + dir.string() + " is not a directory");
  }
  ModelWeights w;
  w.upsampler.kernel = load_tensor(dir / "upsampler_kernel.fqt");
  w.attention.ffn.w1 = load_tensor(dir / "ffn_w1.fqt");
  w.attention.ffn.b1 = load_tensor(dir / "ffn_b1.fqt");
  w.attention.ffn.w2 = load_tensor(dir / "ffn_w2.fqt");
  w.attention.ffn.b2 = load_tensor(dir / "ffn_b2.fqt");
  w.attention.fusion = load_tensor(dir / "fusion.fqt");
  if (std::filesystem::exists(dir / "proj_query.fqt")) {
    w.attention.projections = BasicProjections<float>{
        load_tensor(dir / "proj_query.fqt"), load_tensor(dir / "proj_key.fqt"),
        load_tensor(dir / "proj_value.fqt")};
  }
  w.attention.ffn.validate();
  return w;
}

// Throws DimensionError if `w` cannot serve a model with extents `dims`.
inline void check_weight_dims(const ModelWeights& w, const WeightDims& dims) {
  const std::size_t c = dims.channels, d = dims.token_dim();
  const std::size_t width = dims.fusion_width();
  if (w.upsampler.kernel.shape() != Shape{c, c, 3, 3}) {
    throw DimensionError("upsampler kernel " +
                         shape_string(w.upsampler.kernel.shape()) +
                         " does not match " + std::to_string(c) + " channels");
  }
  w.attention.ffn.validate();
  if (w.attention.ffn.dim() != d) {
    throw DimensionError("FFN width " + std::to_string(w.attention.ffn.dim()) +
                         " does not match token length " + std::to_string(d));
  }
  if (w.attention.fusion.shape() != Shape{width, 2 * width}) {
    throw DimensionError("fusion matrix " + shape_string(w.attention.fusion.shape()) +
                         " does not match feature width " + std::to_string(width));
  }
  if (w.attention.projections &&
      w.attention.projections->query.shape() != Shape{d, d}) {
    throw DimensionError("projection shape does not match token length");
  }
}

}  // namespace fqt

#endif  // FQT_WEIGHTS_HPP_
