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

#ifndef FQT_TOKENIZER_HPP_
#define FQT_TOKENIZER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/numerics.hpp"
#include "fqt/tensor.hpp"
#include "fqt/upsampler.hpp"
#include "fqt/weights.hpp"

namespace fqt {

// Extents of a token set. Frame indices are absolute: the set covers
// t in [frame_offset, frame_offset + frames). Blocks are numbered row-major
// over the grid_rows x grid_cols grid of K x K spectral blocks.
struct TokenLayout {
  std::size_t frame_offset = 0;
  std::size_t frames = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::size_t frequencies = 0;
  std::size_t channels = 0;
  std::size_t kernel = 0;
  std::size_t block = 0;

  std::size_t blocks() const { return grid_rows * grid_cols; }
  std::size_t count() const { return frames * blocks() * frequencies; }
  std::size_t token_dim() const { return channels * kernel * kernel; }

  // Same spatial/frequency configuration, ignoring the frame range.
  bool same_grid(const TokenLayout& o) const {
    return grid_rows == o.grid_rows && grid_cols == o.grid_cols &&
           frequencies == o.frequencies && channels == o.channels &&
           kernel == o.kernel && block == o.block;
  }

  friend bool operator==(const TokenLayout&, const TokenLayout&) = default;
};

// One frequency band of one K x K spectral block of one frame.
template <typename T>
struct BasicFrequencyToken {
  std::size_t t = 0;
  std::size_t i = 0;
  std::size_t f = 0;
  BasicTensor<T> payload;  // C x K x K

  std::span<const T> vec() const { return payload.data(); }
};

// Tokens addressed by (t, i, f). Storage order is irrelevant: lookups go
// through the index table, so a set built in any insertion order detokenizes
// to the same maps.
template <typename T>
class BasicTokenSet {
 public:
  using Token = BasicFrequencyToken<T>;

  BasicTokenSet() = default;
  explicit BasicTokenSet(TokenLayout layout)
      : layout_(layout), slot_(layout.count(), kMissing) {}

  const TokenLayout& layout() const { return layout_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  bool complete() const { return tokens_.size() == layout_.count(); }
  std::span<const Token> tokens() const { return tokens_; }

  void insert(Token token) {
    const std::size_t k = key(token.t, token.i, token.f);
    const Shape want{layout_.channels, layout_.kernel, layout_.kernel};
    if (token.payload.shape() != want) {
      throw DimensionError("token payload " + shape_string(token.payload.shape()) +
                           ", expected " + shape_string(want));
    }
    if (slot_[k] != kMissing) {
      throw IntegrityError("duplicate token (" + std::to_string(token.t) + ", " +
                           std::to_string(token.i) + ", " +
                           std::to_string(token.f) + ")");
    }
    slot_[k] = tokens_.size();
    tokens_.push_back(std::move(token));
  }

  const Token* find(std::size_t t, std::size_t i, std::size_t f) const {
    if (!in_range(t, i, f)) return nullptr;
    const std::size_t s = slot_[key(t, i, f)];
    return s == kMissing ? nullptr : &tokens_[s];
  }

  const Token& at(std::size_t t, std::size_t i, std::size_t f) const {
    const Token* tok = find(t, i, f);
    if (!tok) {
      throw IntegrityError("missing token (" + std::to_string(t) + ", " +
                           std::to_string(i) + ", " + std::to_string(f) + ")");
    }
    return *tok;
  }

  std::span<const T> vec(std::size_t t, std::size_t i, std::size_t f) const {
    return at(t, i, f).vec();
  }

 private:
  static constexpr std::size_t kMissing = static_cast<std::size_t>(-1);

  bool in_range(std::size_t t, std::size_t i, std::size_t f) const {
    return t >= layout_.frame_offset && t < layout_.frame_offset + layout_.frames &&
           i < layout_.blocks() && f < layout_.frequencies;
  }

  std::size_t key(std::size_t t, std::size_t i, std::size_t f) const {
    if (!in_range(t, i, f)) {
      throw IntegrityError("token index (" + std::to_string(t) + ", " +
                           std::to_string(i) + ", " + std::to_string(f) +
                           ") outside the set layout");
    }
    return ((t - layout_.frame_offset) * layout_.blocks() + i) *
               layout_.frequencies + f;
  }

  TokenLayout layout_;
  std::vector<std::size_t> slot_;
  std::vector<Token> tokens_;
};

using FrequencyToken = BasicFrequencyToken<float>;
using TokenSet = BasicTokenSet<float>;

// Splits each spectral map into K x K spatial blocks and each block into its
// F frequency tokens. Map k becomes frame frame_offset + k.
template <typename T>
BasicTokenSet<T> tokenize(std::span<const BasicSpectralMap<T>> maps, std::size_t kernel,
                          std::size_t frame_offset = 0) {
  if (kernel == 0) throw ParameterError("token kernel size must be >= 1");
  if (maps.empty()) throw DimensionError("tokenize needs at least one spectral map");
  const auto& first = maps.front();
  first.validate();
  if (first.grid_height() % kernel || first.grid_width() % kernel) {
    throw DimensionError("spectral grid " + std::to_string(first.grid_height()) +
                         "x" + std::to_string(first.grid_width()) +
                         " is not divisible by kernel " + std::to_string(kernel));
  }
  TokenLayout layout{frame_offset,
                     maps.size(),
                     first.grid_height() / kernel,
                     first.grid_width() / kernel,
                     first.frequencies(),
                     first.channels(),
                     kernel,
                     first.block};
  BasicTokenSet<T> set(layout);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const auto& map = maps[m];
    map.validate();
    if (map.data.shape() != first.data.shape() || map.block != first.block) {
      throw DimensionError("spectral maps in one token set must share a shape");
    }
    for (std::size_t by = 0; by < layout.grid_rows; ++by) {
      for (std::size_t bx = 0; bx < layout.grid_cols; ++bx) {
        const std::size_t i = by * layout.grid_cols + bx;
        for (std::size_t f = 0; f < layout.frequencies; ++f) {
          BasicTensor<T> payload({layout.channels, kernel, kernel});
          for (std::size_t c = 0; c < layout.channels; ++c) {
            for (std::size_t ky = 0; ky < kernel; ++ky) {
              for (std::size_t kx = 0; kx < kernel; ++kx) {
                payload(c, ky, kx) =
                    map.data(f, c, by * kernel + ky, bx * kernel + kx);
              }
            }
          }
          set.insert({frame_offset + m, i, f, std::move(payload)});
        }
      }
    }
  }
  return set;
}

template <typename T>
BasicTokenSet<T> tokenize(const BasicSpectralMap<T>& map, std::size_t kernel,
                          std::size_t frame_offset = 0) {
  return tokenize(std::span<const BasicSpectralMap<T>>(&map, 1), kernel, frame_offset);
}

// Inverse of tokenize. Every (t, i, f) of the layout must be present.
template <typename T>
std::vector<BasicSpectralMap<T>> detokenize(const BasicTokenSet<T>& set) {
  const TokenLayout& l = set.layout();
  if (!set.complete()) {
    throw IntegrityError("token set holds " + std::to_string(set.size()) + " of " +
                         std::to_string(l.count()) + " tokens");
  }
  std::vector<BasicSpectralMap<T>> maps;
  maps.reserve(l.frames);
  for (std::size_t m = 0; m < l.frames; ++m) {
    maps.push_back(BasicSpectralMap<T>::zeros(l.block, l.channels,
                                              l.grid_rows * l.kernel,
                                              l.grid_cols * l.kernel));
  }
  for (const auto& tok : set.tokens()) {
    auto& map = maps[tok.t - l.frame_offset];
    const std::size_t by = tok.i / l.grid_cols, bx = tok.i % l.grid_cols;
    for (std::size_t c = 0; c < l.channels; ++c) {
      for (std::size_t ky = 0; ky < l.kernel; ++ky) {
        for (std::size_t kx = 0; kx < l.kernel; ++kx) {
          map.data(tok.f, c, by * l.kernel + ky, bx * l.kernel + kx) =
              tok.payload(c, ky, kx);
        }
      }
    }
  }
  return maps;
}

// Sizes shared by every stage that turns LR frames into tokens.
struct TokenizerConfig {
  std::size_t alpha = 4;   // SR scale
  std::size_t block = 8;   // DCT block B
  std::size_t kernel = 8;  // token kernel K

  // LR extents must be multiples of this so that alpha * extent is a
  // multiple of B * K.
  std::size_t lr_divisor() const {
    const std::size_t hr = block * kernel;
    return hr / std::gcd(hr, alpha);
  }
};

// Spectral material for the temporal stage, tagged with its frame index.
struct TemporalSource {
  std::size_t t = 0;
  SpectralMap map;
};

// Query, key and value sets for the target frame. The spatial stage uses
// keys/values from the upsampling network's output of the same frame; the
// temporal stage uses earlier frames only. temporal_* have zero frames when
// no earlier material exists.
struct QkvBundle {
  std::size_t target = 0;
  TokenSet queries;
  TokenSet spatial_keys;
  TokenSet spatial_values;
  TokenSet temporal_keys;
  TokenSet temporal_values;
  SpectralMap d_lr;  // DCT of the upsampling network output
};

inline QkvBundle build_qkv(const Tensor& target_lr, std::size_t target,
                           const ModelWeights& weights, const TokenizerConfig& cfg,
                           std::span<const TemporalSource> refs = {}) {
  if (target_lr.rank() != 3) {
    throw DimensionError("target frame must be C x H x W, got " +
                         shape_string(target_lr.shape()));
  }
  QkvBundle b;
  b.target = target;
  const Tensor bicubic =
      bicubic_resize(target_lr, ScaleFactor{static_cast<int>(cfg.alpha), 1});
  const Tensor phi = upsample_network(target_lr, weights.upsampler, cfg.alpha);
  const SpectralMap q_map = frame_to_spectral(bicubic, cfg.block);
  b.d_lr = frame_to_spectral(phi, cfg.block);
  b.queries = tokenize(q_map, cfg.kernel, target);
  b.spatial_keys = tokenize(b.d_lr, cfg.kernel, target);
  b.spatial_values = b.spatial_keys;

  if (refs.empty()) {
    TokenLayout empty = b.queries.layout();
    empty.frames = 0;
    b.temporal_keys = TokenSet(empty);
    b.temporal_values = TokenSet(empty);
    return b;
  }
  std::vector<const TemporalSource*> ordered;
  for (const auto& r : refs) {
    if (r.t >= target) {
      throw IntegrityError("temporal source t=" + std::to_string(r.t) +
                           " is not earlier than target t=" + std::to_string(target));
    }
    if (r.map.data.shape() != b.d_lr.data.shape() || r.map.block != cfg.block) {
      throw DimensionError("temporal source " + shape_string(r.map.data.shape()) +
                           " does not match target spectral map " +
                           shape_string(b.d_lr.data.shape()));
    }
    ordered.push_back(&r);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* c) { return a->t < c->t; });
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if (ordered[k]->t != ordered[k - 1]->t + 1) {
      throw IntegrityError("temporal sources must cover consecutive frames");
    }
  }
  std::vector<SpectralMap> maps;
  for (const auto* r : ordered) maps.push_back(r->map);
  b.temporal_keys = tokenize(std::span<const SpectralMap>(maps), cfg.kernel,
                             ordered.front()->t);
  b.temporal_values = b.temporal_keys;
  return b;
}

}  // namespace fqt

#endif  // FQT_TOKENIZER_HPP_
