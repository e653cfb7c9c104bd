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
#include <functional>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fqt/compressor.hpp"
#include "fqt/dct.hpp"
#include "fqt/gradcheck.hpp"
#include "fqt/metrics.hpp"
#include "fqt/random.hpp"

namespace fqt {
namespace {

TEST(CharbonnierTest, SingleResidualExample) {
  std::vector<Tensor> sr{Tensor({1, 2, 2})}, hr{Tensor({1, 2, 2})};
  hr[0](0, 1, 1) = 3e-3f;
  const LossReport r = charbonnier_loss<float>(sr, hr);
  EXPECT_NEAR(r.total, std::sqrt(10.0) * 1e-3, 1e-9);
  const auto g = charbonnier_grad<float>(sr, hr);
  EXPECT_NEAR(g[0](0, 1, 1), -3.0 / std::sqrt(10.0), 1e-6);
  EXPECT_EQ(g[0](0, 0, 0), 0.0f);
}

TEST(CharbonnierTest, IdenticalFramesGiveEpsilonAndZeroGradient) {
  Rng rng(81);
  std::vector<Tensor> a{random_uniform<float>({3, 4, 4}, rng), random_uniform<float>({3, 4, 4}, rng)};
  EXPECT_NEAR(charbonnier_loss<float>(a, a).total, kCharbonnierEps, 1e-15);
  for (const auto& g : charbonnier_grad<float>(a, a)) {
    for (float v : g.data()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(CharbonnierTest, AveragesFramesAndIsBoundedBelow) {
  Rng rng(82);
  std::vector<Tensor> sr, hr;
  for (int t = 0; t < 3; ++t) {
    sr.push_back(random_uniform<float>({1, 3, 3}, rng));
    hr.push_back(random_uniform<float>({1, 3, 3}, rng));
  }
  const LossReport r = charbonnier_loss<float>(sr, hr);
  ASSERT_EQ(r.per_frame.size(), 3u);
  EXPECT_NEAR(r.total, (r.per_frame[0] + r.per_frame[1] + r.per_frame[2]) / 3, 1e-12);
  for (double v : r.per_frame) EXPECT_GE(v, kCharbonnierEps);
}

TEST(CharbonnierTest, GradientMatchesFiniteDifferences) {
  Rng rng(83);
  std::vector<Tensor64> sr{random_uniform<double>({1, 3, 3}, rng)};
  const std::vector<Tensor64> hr{random_uniform<double>({1, 3, 3}, rng)};
  const auto g = charbonnier_grad<double>(sr, hr);
  const std::function<double(std::span<const double>)> f = [&](std::span<const double> x) {
    std::vector<Tensor64> s{Tensor64({1, 3, 3}, std::vector<double>(x.begin(), x.end()))};
    return charbonnier_loss<double>(s, hr).total;
  };
  const auto rep = gradcheck<double>(f, g[0].data(), sr[0].storage(), 1e-5);
  EXPECT_TRUE(rep.passed) << rep.max_rel_error;
}

TEST(CharbonnierTest, Errors) {
  std::vector<Tensor> a{Tensor({1, 2, 2})}, b{Tensor({1, 2, 3})}, none;
  EXPECT_THROW(charbonnier_loss<float>(a, b), DimensionError);
  EXPECT_THROW(charbonnier_loss<float>(none, none), DimensionError);
  EXPECT_THROW(charbonnier_loss<float>(a, a, 0.0), ParameterError);
}

TEST(PsnrTest, IdenticalFramesAreInfinite) {
  const Tensor a({3, 4, 4}, 0.3f);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
}

TEST(PsnrTest, ConstantOffsetMatchesFormula) {
  const Tensor a({3, 8, 8}, 100.0f), b({3, 8, 8}, 116.0f);
  EXPECT_NEAR(psnr(a, b, 255.0), 20.0 * std::log10(255.0 / 16.0), 1e-9);
  EXPECT_NEAR(psnr(Tensor({1, 2, 2}, 0.0f), Tensor({1, 2, 2}, 0.1f)), 20.0, 1e-6);
}

TEST(PsnrTest, DoublingMseLosesThreeDecibels) {
  Rng rng(84);
  const Tensor a = random_uniform<float>({3, 16, 16}, rng);
  Tensor b = a, c = a;
  for (std::size_t k = 0; k < a.size(); k += 2) b[k] += 0.05f;
  for (std::size_t k = 0; k < a.size(); ++k) c[k] += 0.05f;
  EXPECT_NEAR(psnr(a, b) - psnr(a, c), 10.0 * std::log10(2.0), 1e-4);
}

TEST(PsnrTest, DecreasesWithNoiseAmplitude) {
  Rng rng(85);
  const Tensor a = random_uniform<float>({3, 16, 16}, rng);
  const Tensor noise = random_normal<float>({3, 16, 16}, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (float amp : {0.001f, 0.01f, 0.05f, 0.2f}) {
    const double p = psnr(a, a + noise * amp);
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_THROW(psnr(a, a, 0.0), ParameterError);
  EXPECT_THROW(psnr(a, Tensor({3, 16, 15})), DimensionError);
}

TEST(LumaTest, Bt601Weights) {
  Tensor rgb({3, 1, 1});
  rgb(0, 0, 0) = 1.0f;
  rgb(1, 0, 0) = 0.5f;
  rgb(2, 0, 0) = 0.25f;
  EXPECT_NEAR(luma(rgb)(0, 0, 0), 0.299 + 0.2935 + 0.0285, 1e-6);
  EXPECT_THROW(luma(Tensor({2, 1, 1})), DimensionError);
}

TEST(SsimTest, IdentityIsOne) {
  Rng rng(86);
  const Tensor a = random_uniform<float>({1, 24, 20}, rng);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(SsimTest, ConstantFramesClosedForm) {
  const double ma = 0.2, mb = 0.7, c1 = 1e-4;
  const Tensor a({16, 16}, float(ma)), b({16, 16}, float(mb));
  const double fa = float(ma), fb = float(mb);
  EXPECT_NEAR(ssim(a, b), (2 * fa * fb + c1) / (fa * fa + fb * fb + c1), 1e-6);
}

TEST(SsimTest, SymmetricAndBounded) {
  Rng rng(87);
  for (int n = 0; n < 5; ++n) {
    const Tensor a = random_uniform<float>({1, 16, 16}, rng);
    const Tensor b = random_uniform<float>({1, 16, 16}, rng);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
    EXPECT_LE(ssim(a, b), 1.0);
    EXPECT_GE(ssim(a, b), -1.0);
  }
}

TEST(SsimTest, Errors) {
  EXPECT_THROW(ssim(Tensor({3, 16, 16}), Tensor({3, 16, 16})), DimensionError);
  EXPECT_THROW(ssim(Tensor({10, 16}), Tensor({10, 16})), ParameterError);
  EXPECT_THROW(ssim(Tensor({16, 16}), Tensor({16, 17})), DimensionError);
}

TEST(SpectrumTest, ConstantFrameOnlyHasBandZero) {
  const auto bands = amplitude_spectrum(Tensor({3, 16, 16}, 0.5f), 8, 0, 14);
  ASSERT_EQ(bands.size(), 15u);
  EXPECT_NEAR(bands[0].value, 0.5 * 8, 1e-5);
  EXPECT_EQ(bands[0].count, 3u * 4);
  for (std::size_t d = 1; d < bands.size(); ++d) EXPECT_NEAR(bands[d].value, 0.0, 1e-6);
}

TEST(SpectrumTest, SingleBasisFunctionHitsOneBand) {
  SpectralMap m = SpectralMap::zeros(4, 1, 2, 2);
  m.data(1 * 4 + 2, 0, 1, 0) = 2.0f;  // u = 1, v = 2
  const Tensor frame = spectral_to_frame(m);
  const auto bands = amplitude_spectrum(frame, 4, 0, 6);
  for (const auto& b : bands) {
    if (b.band == 3) {
      EXPECT_NEAR(b.value * b.count, 2.0, 1e-5);
    } else {
      EXPECT_NEAR(b.value, 0.0, 1e-6);
    }
  }
}

TEST(SpectrumTest, EnergyModeSumsToFrameEnergy) {
  Rng rng(88);
  const Tensor f = random_uniform<float>({3, 16, 24}, rng);
  double total = 0;
  for (const auto& b : amplitude_spectrum(f, 8, 0, 100, SpectrumMode::kEnergy)) {
    total += b.value * b.count;
  }
  EXPECT_NEAR(total, sum_squares(f), 1e-3 * sum_squares(f));
}

TEST(SpectrumTest, RangeErrors) {
  EXPECT_THROW(amplitude_spectrum(Tensor({1, 8, 8}), 8, 15, 20), ParameterError);
  EXPECT_THROW(amplitude_spectrum(Tensor({1, 8, 8}), 8, 5, 4), ParameterError);
  EXPECT_EQ(amplitude_spectrum(Tensor({1, 8, 8}), 8, 10, 99).size(), 5u);
}

TEST(GradcheckTest, LinearFunctionAgrees) {
  const std::vector<double> coeffs{1.5, -2.0, 0.25};
  const std::function<double(std::span<const double>)> f = [&](std::span<const double> x) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += coeffs[k] * x[k];
    return s;
  };
  const auto rep = gradcheck<double>(f, coeffs, {0.3, 0.1, -4.0}, 1e-8);
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.max_rel_error, 1e-9);
}

TEST(GradcheckTest, WrongGradientFailsAndNonFiniteThrows) {
  const std::function<double(std::span<const double>)> sq = [](std::span<const double> x) {
    return x[0] * x[0];
  };
  EXPECT_FALSE(gradcheck<double>(sq, std::vector<double>{1.0}, {2.0}, 1e-5).passed);
  const std::function<double(std::span<const double>)> bad = [](std::span<const double> x) {
    return std::log(x[0]);
  };
  EXPECT_THROW(gradcheck<double>(bad, std::vector<double>{1.0}, {0.0}, 1e-5), NumericError);
  EXPECT_THROW(gradcheck<double>(sq, std::vector<double>{1.0, 2.0}, {0.0}, 1e-5), DimensionError);
}

}  // namespace
}  // namespace fqt
