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
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fqt/compressor.hpp"
#include "fqt/dct.hpp"
#include "fqt/metrics.hpp"
#include "fqt/random.hpp"
#include "fqt/verify/acceptance.hpp"

namespace fqt {
namespace {

TEST(QuantizeTest, ZeroStrengthIsRoundtrip) {
  Rng rng(91);
  const Tensor f = random_uniform<float>({3, 20, 28}, rng);
  EXPECT_LT(max_abs_diff(quantize_compress(f, 0.0, 8), f), 1e-5f);
}

TEST(QuantizeTest, ConstantFrameStaysWithinHalfDcStep) {
  const double q = 6.0 / 255.0;
  const Tensor f({1, 16, 16}, 0.37f);
  const Tensor out = quantize_compress(f, q, 8);
  // DC coefficient is 8 * value; half a step of q becomes q / 16 per pixel.
  for (float v : out.data()) EXPECT_LE(std::abs(v - 0.37f), q / 16 + 1e-6);
}

TEST(QuantizeTest, CoefficientErrorBoundedByHalfStep) {
  Rng rng(92);
  const double q = 0.05;
  const Tensor f = random_uniform<float>({2, 16, 16}, rng);
  const SpectralMap a = frame_to_spectral(f, 8);
  const SpectralMap b = frame_to_spectral(quantize_compress(f, q, 8), 8);
  const std::size_t per = 2 * 2 * 2;
  for (std::size_t u = 0; u < 8; ++u) {
    for (std::size_t v = 0; v < 8; ++v) {
      const double s = quantization_step(u, v, q);
      for (std::size_t k = 0; k < per; ++k) {
        const std::size_t idx = (u * 8 + v) * per + k;
        EXPECT_LE(std::abs(a.data[idx] - b.data[idx]), s / 2 + 1e-5);
      }
    }
  }
}

TEST(QuantizeTest, QualityDropsAsStrengthGrows) {
  const Tensor f = acceptance::synthetic_texture(93, 64);
  double prev = std::numeric_limits<double>::infinity();
  double prev_high = high_band_amplitude(f, 8, 8);
  for (const auto& p : kQualityPresets) {
    const Tensor g = quantize_compress(f, p.q, 8);
    const double now = psnr(f, g);
    EXPECT_LT(now, prev) << p.name;
    prev = now;
    const double high = high_band_amplitude(g, 8, 8);
    EXPECT_LT(high, prev_high) << p.name;
    prev_high = high;
  }
}

TEST(QuantizeTest, Deterministic) {
  Rng rng(94);
  const Tensor f = random_uniform<float>({3, 17, 9}, rng);
  EXPECT_EQ(quantize_compress(f, 0.03, 8), quantize_compress(f, 0.03, 8));
  EXPECT_EQ(quantize_compress(f, 0.03, 8).shape(), f.shape());
}

TEST(QuantizeTest, Errors) {
  EXPECT_THROW(quantize_compress(Tensor({3, 8, 8}), -1.0, 8), ParameterError);
  EXPECT_THROW(quantize_compress(Tensor({3, 8, 8}), 0.1, 0), ParameterError);
  EXPECT_THROW(quantize_compress(Tensor({8, 8}), 0.1, 8), DimensionError);
}

TEST(QuantizationStepTest, GrowsWithFrequency) {
  EXPECT_DOUBLE_EQ(quantization_step(0, 0, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(quantization_step(3, 4, 0.1), 0.8);
  EXPECT_DOUBLE_EQ(quantization_step(7, 7, 0.0), 0.0);
}

TEST(ParseQualityTest, PresetsAndNumbers) {
  EXPECT_DOUBLE_EQ(*parse_quality("crf15-like"), 1.0 / 255.0);
  EXPECT_DOUBLE_EQ(*parse_quality("crf25-like"), 6.0 / 255.0);
  EXPECT_DOUBLE_EQ(*parse_quality("crf35-like"), 20.0 / 255.0);
  EXPECT_DOUBLE_EQ(*parse_quality("0.5"), 0.5);
  EXPECT_FALSE(parse_quality("-1").has_value());
  EXPECT_FALSE(parse_quality("0.5x").has_value());
  EXPECT_FALSE(parse_quality("crf").has_value());
}

TEST(DegradeTest, ScaleOneWithoutQuantizationIsIdentity) {
  Rng rng(95);
  const std::vector<Tensor> hr{random_uniform<float>({3, 16, 16}, rng)};
  const auto lr = degrade_sequence(hr, DegradeConfig{1, 0.0, 8});
  EXPECT_LT(max_abs_diff(lr[0], hr[0]), 1e-5f);
}

TEST(DegradeTest, DownsamplesByScale) {
  Rng rng(96);
  const std::vector<Tensor> hr(2, random_uniform<float>({3, 256, 256}, rng));
  const auto lr = degrade_sequence(hr, DegradeConfig{4, 6.0 / 255.0, 8});
  ASSERT_EQ(lr.size(), 2u);
  EXPECT_EQ(lr[0].shape(), (Shape{3, 64, 64}));
  EXPECT_EQ(lr[0], lr[1]);
}

TEST(DegradeTest, Errors) {
  const std::vector<Tensor> hr{Tensor({3, 18, 16})};
  EXPECT_THROW(degrade_sequence(hr, DegradeConfig{4, 0.0, 8}), DimensionError);
  EXPECT_THROW(degrade_sequence(hr, DegradeConfig{0, 0.0, 8}), ParameterError);
}

}  // namespace
}  // namespace fqt
