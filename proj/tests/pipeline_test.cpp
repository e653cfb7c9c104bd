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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fqt/numerics.hpp"
#include "fqt/pipeline.hpp"
#include "fqt/random.hpp"
#include "fqt/upsampler.hpp"

namespace fqt {
namespace {

PipelineConfig small_config(Scheme scheme = Scheme::kST) {
  PipelineConfig cfg;
  cfg.tokens = {4, 4, 4};
  cfg.scheme = scheme;
  return cfg;
}

ModelWeights weights_for(const PipelineConfig& cfg, std::uint64_t seed = 5) {
  return seeded_weights(cfg.weight_dims(16, false), seed);
}

VideoSequence random_video(std::uint64_t seed, std::size_t frames, std::size_t h,
                           std::size_t w) {
  Rng rng(seed);
  VideoSequence v;
  for (std::size_t t = 0; t < frames; ++t) v.push_back(random_uniform<float>({3, h, w}, rng));
  return v;
}

TEST(FlowWarpTest, ZeroFlowIsIdentity) {
  Rng rng(61);
  const SpectralMap m{random_normal<float>({4, 2, 5, 6}, rng), 2};
  EXPECT_EQ(flow_warp(m, FlowField::zeros(5, 6)), m);
}

TEST(FlowWarpTest, IntegerFlowShiftsWithZeroFill) {
  Rng rng(62);
  const SpectralMap m{random_normal<float>({1, 1, 3, 4}, rng), 1};
  FlowField f = FlowField::zeros(3, 4);
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t x = 0; x < 4; ++x) f.data(0, y, x) = 1.0f;
  }
  const SpectralMap out = flow_warp(m, f);
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t x = 0; x < 3; ++x) EXPECT_EQ(out.data(0, 0, y, x), m.data(0, 0, y, x + 1));
    EXPECT_EQ(out.data(0, 0, y, 3), 0.0f);
  }
}

TEST(FlowWarpTest, HalfPixelFlowInterpolatesRamp) {
  SpectralMap m = SpectralMap::zeros(1, 1, 2, 5);
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 0; x < 5; ++x) m.data(0, 0, y, x) = static_cast<float>(x);
  }
  FlowField f = FlowField::zeros(2, 5);
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 0; x < 5; ++x) f.data(0, y, x) = 0.5f;
  }
  const SpectralMap out = flow_warp(m, f);
  for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(out.data(0, 0, 1, x), x + 0.5, 1e-6);
  EXPECT_NEAR(out.data(0, 0, 1, 4), 2.0, 1e-6);  // half of the tap falls outside
}

TEST(FlowWarpTest, ShapeMismatch) {
  EXPECT_THROW(flow_warp(SpectralMap::zeros(1, 1, 2, 5), FlowField::zeros(2, 4)), DimensionError);
}

TEST(DownscaleFlowTest, AveragesAndRescales) {
  FlowField f = FlowField::zeros(4, 4);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      f.data(0, y, x) = 8.0f;
      f.data(1, y, x) = x < 2 ? 2.0f : 6.0f;
    }
  }
  const FlowField g = downscale_flow(f, 2);
  EXPECT_EQ(g.data.shape(), (Shape{2, 2, 2}));
  EXPECT_FLOAT_EQ(g.data(0, 0, 0), 4.0f);
  EXPECT_FLOAT_EQ(g.data(1, 1, 0), 1.0f);
  EXPECT_FLOAT_EQ(g.data(1, 1, 1), 3.0f);
  EXPECT_THROW(downscale_flow(FlowField::zeros(3, 4), 2), DimensionError);
}

TEST(StepTest, ZeroAttentionWithSecondHalfFusionDoublesUpsample) {
  PipelineConfig cfg = small_config();
  cfg.zero_attention = true;
  ModelWeights w = weights_for(cfg);
  w.attention.fusion.fill(0.0f);
  const std::size_t width = 16 * 3;
  for (std::size_t r = 0; r < width; ++r) w.attention.fusion(r, width + r) = 1.0f;
  const Tensor lr = random_video(63, 1, 16, 16).front();
  const StepResult r = step(lr, initial_hidden(cfg, 16, 16), std::nullopt, w, cfg);
  const Tensor phi = upsample_network(lr, w.upsampler, 4);
  EXPECT_LT(max_abs_diff(r.sr, phi * 2.0f), 1e-4f);
}

TEST(StepTest, ZeroInputGivesZeroOutput) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const StepResult r = step(Tensor({3, 16, 16}), initial_hidden(cfg, 16, 16), std::nullopt, w, cfg);
  for (float v : r.sr.data()) EXPECT_EQ(v, 0.0f);
}

TEST(StepTest, HiddenShapeIsConstantAndHistoryBounded) {
  PipelineConfig cfg = small_config();
  cfg.history_depth = 2;
  const ModelWeights w = weights_for(cfg);
  const VideoSequence v = random_video(64, 4, 12, 20);
  HiddenState h = initial_hidden(cfg, 12, 20);
  const Shape shape = h.maps.front().data.shape();
  for (std::size_t t = 0; t < v.size(); ++t) {
    StepResult r = step(v[t], h, std::nullopt, w, cfg, t);
    EXPECT_EQ(r.sr.shape(), (Shape{3, 48, 80}));
    EXPECT_EQ(r.hidden.maps.size(), std::min<std::size_t>(t + 1, 2));
    for (const auto& m : r.hidden.maps) EXPECT_EQ(m.data.shape(), shape);
    h = std::move(r.hidden);
  }
}

TEST(StepTest, MismatchedWeightsAreParameterError) {
  const PipelineConfig cfg = small_config();
  PipelineConfig other = cfg;
  other.tokens.kernel = 2;
  const ModelWeights w = weights_for(other);
  EXPECT_THROW(step(Tensor({3, 16, 16}), initial_hidden(cfg, 16, 16), std::nullopt, w, cfg),
               ParameterError);
}

TEST(StepTest, AcceptsFlowForUnpaddedFrame) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const VideoSequence v = random_video(65, 2, 10, 14);
  StepResult r0 = step(v[0], initial_hidden(cfg, 10, 14), std::nullopt, w, cfg, 0);
  const StepResult a = step(v[1], r0.hidden, FlowField::zeros(40, 56), w, cfg, 1);
  const StepResult b = step(v[1], r0.hidden, std::nullopt, w, cfg, 1);
  EXPECT_EQ(a.sr, b.sr);
  EXPECT_THROW(step(v[1], r0.hidden, FlowField::zeros(40, 40), w, cfg, 1), DimensionError);
}

TEST(RunSequenceTest, ShapesForSingleAndManyFrames) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  EXPECT_EQ(run_sequence(random_video(66, 1, 16, 16), nullptr, w, cfg).size(), 1u);
  const VideoSequence out = run_sequence(random_video(66, 5, 16, 16), nullptr, w, cfg);
  ASSERT_EQ(out.size(), 5u);
  for (const auto& f : out) EXPECT_EQ(f.shape(), (Shape{3, 64, 64}));
}

TEST(RunSequenceTest, EmptyAndInconsistentInput) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  EXPECT_THROW(run_sequence({}, nullptr, w, cfg), ParameterError);
  VideoSequence v = random_video(67, 2, 16, 16);
  v[1] = Tensor({3, 16, 8});
  EXPECT_THROW(run_sequence(v, nullptr, w, cfg), DimensionError);
}

TEST(RunSequenceTest, ThreadCountDoesNotChangeOutput) {
  for (Scheme s : kAllSchemes) {
    PipelineConfig cfg = small_config(s);
    const ModelWeights w = weights_for(cfg);
    const VideoSequence v = random_video(68, 3, 16, 16);
    const VideoSequence one = run_sequence(v, nullptr, w, cfg);
    cfg.threads = 4;
    EXPECT_EQ(run_sequence(v, nullptr, w, cfg), one) << scheme_name(s);
  }
}

TEST(RunSequenceTest, Causality) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  VideoSequence v = random_video(69, 4, 16, 16);
  const VideoSequence before = run_sequence(v, nullptr, w, cfg);
  v[3].fill(0.25f);
  const VideoSequence after = run_sequence(v, nullptr, w, cfg);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(before[t], after[t]);
  EXPECT_NE(before[3], after[3]);
}

TEST(RunSequenceTest, BidirectionalMatchesForwardOnStaticVideo) {
  PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const Tensor frame = random_video(70, 1, 16, 16).front();
  const VideoSequence v(3, frame);
  const VideoSequence fwd = run_sequence(v, nullptr, w, cfg);
  cfg.bidirectional = true;
  const VideoSequence both = run_sequence(v, nullptr, w, cfg);
  // Middle frame sees the same history in both directions.
  EXPECT_LT(max_abs_diff(both[1], fwd[1]), 1e-5f);
  // First and last outputs average the two ends of the recurrence.
  const Tensor expect0 = (fwd[0] + fwd[2]) * 0.5f;
  EXPECT_LT(max_abs_diff(both[0], expect0), 1e-5f);
  EXPECT_LT(max_abs_diff(both[2], expect0), 1e-5f);
}

TEST(TilingTest, SingleTileIsUntiledInference) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const Tensor f = random_video(71, 1, 16, 16).front();
  EXPECT_EQ(tiled_inference(f, w, cfg, 1), run_sequence({f}, nullptr, w, cfg).front());
}

TEST(TilingTest, ConstantFrameIsTileInvariant) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const Tensor f({3, 16, 16}, 0.4f);
  EXPECT_LT(max_abs_diff(tiled_inference(f, w, cfg, 2), tiled_inference(f, w, cfg, 1)), 1e-5f);
}

TEST(TilingTest, TileSmallerThanTokenBlockIsRejected) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  EXPECT_THROW(tiled_inference(Tensor({3, 16, 16}), w, cfg, 8), ParameterError);
}

// Pixels at least B*K HR pixels from every tile seam must not depend on the
// tiling.
TEST(TilingTest, InteriorAgreesWithUntiledInference) {
  const PipelineConfig cfg = small_config();
  const ModelWeights w = weights_for(cfg);
  const Tensor f = random_video(72, 1, 32, 32).front();
  const Tensor whole = tiled_inference(f, w, cfg, 1);
  const Tensor tiled = tiled_inference(f, w, cfg, 2);
  const std::size_t seam = 64, margin = 16;  // B * K
  double worst = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 128; ++y) {
      for (std::size_t x = 0; x < 128; ++x) {
        const auto dy = y > seam ? y - seam : seam - y, dx = x > seam ? x - seam : seam - x;
        if (std::min(dy, dx) < margin) continue;
        worst = std::max(worst, double(std::abs(whole(c, y, x) - tiled(c, y, x))));
      }
    }
  }
  EXPECT_LT(worst, 1e-4);
}

}  // namespace
}  // namespace fqt
