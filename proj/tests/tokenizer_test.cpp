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


#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "fqt/random.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/weights.hpp"

namespace fqt {
namespace {

SpectralMap random_map(Rng& rng, std::size_t b, std::size_t c, std::size_t h, std::size_t w) {
  return {random_normal<float>({b * b, c, h, w}, rng), b};
}

TEST(TokenizeTest, GoldenShapeFor64x64Frame) {
  Rng rng(21);
  const Tensor lr = random_uniform<float>({3, 64, 64}, rng);
  const QkvBundle b = build_qkv(lr, 0, seeded_weights(WeightDims{}, 7), TokenizerConfig{4, 8, 8});
  EXPECT_EQ(b.d_lr.grid_height(), 32u);
  EXPECT_EQ(b.d_lr.grid_width(), 32u);
  const TokenLayout& l = b.queries.layout();
  EXPECT_EQ(l.blocks(), 16u);
  EXPECT_EQ(l.frequencies, 64u);
  EXPECT_EQ(b.queries.tokens().front().payload.shape(), (Shape{3, 8, 8}));
  EXPECT_EQ(b.queries.size(), 1024u);
  EXPECT_EQ(l.token_dim(), 192u);
}

TEST(TokenizeTest, SingleBlockGivesOneTokenPerFrequency) {
  Rng rng(22);
  const TokenSet s = tokenize(random_map(rng, 4, 2, 4, 4), 4);
  EXPECT_EQ(s.size(), 16u);
  EXPECT_EQ(s.layout().blocks(), 1u);
}

TEST(TokenizeTest, CountIdentityAndExactRoundtrip) {
  Rng rng(23);
  for (int n = 0; n < 30; ++n) {
    const std::size_t frames = 1 + rng.index(4), rows = 1 + rng.index(4), cols = 1 + rng.index(4);
    const std::size_t b = rng.index(2) ? 8 : 4, k = rng.index(2) ? 8 : 4;
    std::vector<SpectralMap> maps;
    for (std::size_t t = 0; t < frames; ++t) maps.push_back(random_map(rng, b, 3, rows * k, cols * k));
    const TokenSet s = tokenize(std::span<const SpectralMap>(maps), k, 5);
    EXPECT_EQ(s.size(), frames * rows * cols * b * b);
    EXPECT_TRUE(s.complete());
    EXPECT_EQ(detokenize(s), maps);
  }
}

TEST(TokenizeTest, PayloadIsBlockSlice) {
  Rng rng(24);
  const SpectralMap m = random_map(rng, 2, 2, 4, 6);
  const TokenSet s = tokenize(m, 2);
  // Block 4 is row 1, column 1 of the 2 x 3 grid.
  const auto& tok = s.at(0, 4, 3);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t x = 0; x < 2; ++x) EXPECT_EQ(tok.payload(c, y, x), m.data(3, c, 2 + y, 2 + x));
    }
  }
}

TEST(TokenizeTest, MisalignedGridIsDimensionError) {
  Rng rng(25);
  EXPECT_THROW(tokenize(random_map(rng, 2, 1, 6, 8), 4), DimensionError);
  EXPECT_THROW(tokenize(random_map(rng, 2, 1, 4, 4), 0), ParameterError);
}

TEST(TokenizeTest, MixedShapesAreDimensionError) {
  Rng rng(26);
  std::vector<SpectralMap> maps{random_map(rng, 2, 1, 4, 4), random_map(rng, 2, 1, 4, 8)};
  EXPECT_THROW(tokenize(std::span<const SpectralMap>(maps), 2), DimensionError);
}

TEST(DetokenizeTest, MissingTokenIsIntegrityError) {
  Rng rng(27);
  const TokenSet full = tokenize(random_map(rng, 2, 1, 4, 4), 2);
  TokenSet partial(full.layout());
  for (std::size_t k = 1; k < full.size(); ++k) partial.insert(full.tokens()[k]);
  EXPECT_FALSE(partial.complete());
  EXPECT_THROW(detokenize(partial), IntegrityError);
  EXPECT_THROW(partial.at(0, 0, 0), IntegrityError);
  EXPECT_EQ(partial.find(0, 0, 0), nullptr);
}

TEST(DetokenizeTest, SingleNonzeroTokenLandsInOneChannel) {
  const TokenLayout l{0, 1, 1, 1, 64, 1, 8, 8};
  TokenSet s(l);
  for (std::size_t f = 0; f < 64; ++f) {
    Tensor p({1, 8, 8}, f == 9 ? 1.5f : 0.0f);
    s.insert({0, 0, f, std::move(p)});
  }
  const auto maps = detokenize(s);
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_EQ(maps[0].data.shape(), (Shape{64, 1, 8, 8}));
  for (std::size_t f = 0; f < 64; ++f) {
    for (std::size_t k = 0; k < 64; ++k) {
      EXPECT_EQ(maps[0].data[f * 64 + k], f == 9 ? 1.5f : 0.0f);
    }
  }
}

TEST(DetokenizeTest, StorageOrderIsIrrelevant) {
  Rng rng(28);
  std::vector<SpectralMap> maps{random_map(rng, 2, 3, 4, 4), random_map(rng, 2, 3, 4, 4)};
  const TokenSet s = tokenize(std::span<const SpectralMap>(maps), 2);
  std::vector<FrequencyToken> shuffled(s.tokens().begin(), s.tokens().end());
  for (std::size_t j = shuffled.size(); j > 1; --j) std::swap(shuffled[j - 1], shuffled[rng.index(j)]);
  TokenSet t(s.layout());
  for (auto& tok : shuffled) t.insert(tok);
  EXPECT_EQ(detokenize(t), maps);
}

TEST(TokenSetTest, InsertValidation) {
  const TokenLayout l{2, 1, 1, 2, 4, 1, 2, 2};
  TokenSet s(l);
  s.insert({2, 1, 3, Tensor({1, 2, 2})});
  EXPECT_THROW(s.insert({2, 1, 3, Tensor({1, 2, 2})}), IntegrityError);
  EXPECT_THROW(s.insert({1, 0, 0, Tensor({1, 2, 2})}), IntegrityError);
  EXPECT_THROW(s.insert({2, 2, 0, Tensor({1, 2, 2})}), IntegrityError);
  EXPECT_THROW(s.insert({2, 0, 0, Tensor({2, 2, 2})}), DimensionError);
}

ModelWeights bicubic_only() {
  ModelWeights w = seeded_weights(WeightDims{}, 3);
  w.upsampler.kernel.fill(0.0f);
  return w;
}

TEST(BuildQkvTest, ExactBicubicUpsamplerMakesQueriesEqualKeys) {
  Rng rng(29);
  const Tensor lr = random_uniform<float>({3, 16, 16}, rng);
  const QkvBundle b = build_qkv(lr, 0, bicubic_only(), TokenizerConfig{4, 8, 8});
  ASSERT_EQ(b.queries.size(), b.spatial_keys.size());
  for (const auto& q : b.queries.tokens()) {
    EXPECT_EQ(q.payload, b.spatial_keys.at(q.t, q.i, q.f).payload);
  }
}

TEST(BuildQkvTest, SeededUpsamplerSeparatesQueriesFromKeys) {
  Rng rng(30);
  const Tensor lr = random_uniform<float>({3, 16, 16}, rng);
  const QkvBundle b = build_qkv(lr, 0, seeded_weights(WeightDims{}, 3), TokenizerConfig{4, 8, 8});
  EXPECT_NE(detokenize(b.queries), detokenize(b.spatial_keys));
}

TEST(BuildQkvTest, ZeroFrameGivesZeroTokens) {
  const QkvBundle b =
      build_qkv(Tensor({3, 16, 16}), 0, seeded_weights(WeightDims{}, 3), TokenizerConfig{4, 8, 8});
  for (const auto* set : {&b.queries, &b.spatial_keys, &b.spatial_values}) {
    for (const auto& tok : set->tokens()) {
      for (float v : tok.payload.data()) EXPECT_EQ(v, 0.0f);
    }
  }
}

TEST(BuildQkvTest, FrameIndices) {
  Rng rng(31);
  const TokenizerConfig cfg{4, 8, 8};
  const ModelWeights w = seeded_weights(WeightDims{}, 3);
  const Tensor lr = random_uniform<float>({3, 16, 16}, rng);
  const QkvBundle probe = build_qkv(lr, 0, w, cfg);
  EXPECT_EQ(probe.temporal_keys.layout().frames, 0u);
  std::vector<TemporalSource> refs{{3, probe.d_lr}, {2, probe.d_lr}};
  const QkvBundle b = build_qkv(lr, 4, w, cfg, refs);
  for (const auto& q : b.queries.tokens()) EXPECT_EQ(q.t, 4u);
  for (const auto& k : b.temporal_keys.tokens()) EXPECT_LT(k.t, 4u);
  EXPECT_EQ(b.temporal_keys.layout().frame_offset, 2u);
  EXPECT_EQ(b.temporal_keys.layout().frames, 2u);
}

TEST(BuildQkvTest, Errors) {
  Rng rng(32);
  const TokenizerConfig cfg{4, 8, 8};
  const ModelWeights w = seeded_weights(WeightDims{}, 3);
  const Tensor lr = random_uniform<float>({3, 16, 16}, rng);
  const QkvBundle probe = build_qkv(lr, 0, w, cfg);
  std::vector<TemporalSource> future{{2, probe.d_lr}};
  EXPECT_THROW(build_qkv(lr, 2, w, cfg, future), IntegrityError);
  std::vector<TemporalSource> gap{{0, probe.d_lr}, {2, probe.d_lr}};
  EXPECT_THROW(build_qkv(lr, 3, w, cfg, gap), IntegrityError);
  std::vector<TemporalSource> wrong{{0, SpectralMap::zeros(8, 3, 16, 16)}};
  EXPECT_THROW(build_qkv(lr, 1, w, cfg, wrong), DimensionError);
  EXPECT_THROW(build_qkv(Tensor({16, 16}), 0, w, cfg), DimensionError);
}

TEST(TokenizerConfigTest, LrDivisor) {
  EXPECT_EQ((TokenizerConfig{4, 8, 8}.lr_divisor()), 16u);
  EXPECT_EQ((TokenizerConfig{2, 8, 8}.lr_divisor()), 32u);
  EXPECT_EQ((TokenizerConfig{4, 4, 4}.lr_divisor()), 4u);
  EXPECT_EQ((TokenizerConfig{3, 8, 8}.lr_divisor()), 64u);
}

}  // namespace
}  // namespace fqt
