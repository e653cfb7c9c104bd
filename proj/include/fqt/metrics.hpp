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

#ifndef FQT_METRICS_HPP_
#define FQT_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/tensor.hpp"

namespace fqt {

// ---------------------------------------------------------------------------
// Charbonnier loss: L = (1/T) sum_t sqrt(||hr_t - sr_t||^2 + eps^2)

inline constexpr double kCharbonnierEps = 1e-3;

struct LossReport {
  double total = 0.0;
  std::vector<double> per_frame;
  double eps = kCharbonnierEps;
};

namespace detail {

template <typename T>
void require_matching_sequences(std::span<const BasicTensor<T>> sr,
                                std::span<const BasicTensor<T>> hr, double eps) {
  if (!(eps > 0)) throw ParameterError("Charbonnier epsilon must be positive");
  if (sr.empty() || sr.size() != hr.size()) {
    throw DimensionError("sequence lengths " + std::to_string(sr.size()) + " and " +
                         std::to_string(hr.size()));
  }
  for (std::size_t t = 0; t < sr.size(); ++t) sr[t].require_same_shape(hr[t], "charbonnier");
}

template <typename T>
double residual_norm2(const BasicTensor<T>& sr, const BasicTensor<T>& hr) {
  double s = 0.0;
  for (std::size_t k = 0; k < sr.size(); ++k) {
    const double r = static_cast<double>(hr[k]) - static_cast<double>(sr[k]);
    s += r * r;
  }
  return s;
}

}  // namespace detail

template <typename T>
LossReport charbonnier_loss(std::span<const BasicTensor<T>> sr,
                            std::span<const BasicTensor<T>> hr,
                            double eps = kCharbonnierEps) {
  detail::require_matching_sequences(sr, hr, eps);
  LossReport report;
  report.eps = eps;
  for (std::size_t t = 0; t < sr.size(); ++t) {
    report.per_frame.push_back(std::sqrt(detail::residual_norm2(sr[t], hr[t]) + eps * eps));
  }
  double sum = 0.0;
  for (double v : report.per_frame) sum += v;
  report.total = sum / static_cast<double>(sr.size());
  return report;
}

// dL/d sr_t = -(1/T) (hr_t - sr_t) / sqrt(||hr_t - sr_t||^2 + eps^2)
template <typename T>
std::vector<BasicTensor<T>> charbonnier_grad(std::span<const BasicTensor<T>> sr,
                                             std::span<const BasicTensor<T>> hr,
                                             double eps = kCharbonnierEps) {
  detail::require_matching_sequences(sr, hr, eps);
  const double inv_t = 1.0 / static_cast<double>(sr.size());
  std::vector<BasicTensor<T>> grads;
  for (std::size_t t = 0; t < sr.size(); ++t) {
    const double denom = std::sqrt(detail::residual_norm2(sr[t], hr[t]) + eps * eps);
    BasicTensor<T> g(sr[t].shape());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double r = static_cast<double>(hr[t][k]) - static_cast<double>(sr[t][k]);
      g[k] = static_cast<T>(-inv_t * r / denom);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// ---------------------------------------------------------------------------
// PSNR over all channels jointly. Identical inputs give +infinity.

template <typename T>
double mse(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  a.require_same_shape(b, "mse");
  if (a.empty()) throw DimensionError("mse of empty frames");
  return detail::residual_norm2(a, b) / static_cast<double>(a.size());
}

template <typename T>
double psnr(const BasicTensor<T>& a, const BasicTensor<T>& b, double peak = 1.0) {
  if (!(peak > 0)) throw ParameterError("PSNR peak must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

// BT.601 luma of an RGB frame (3 x H x W -> 1 x H x W). Single-channel frames
// pass through.
template <typename T>
BasicTensor<T> luma(const BasicTensor<T>& frame) {
  if (frame.rank() != 3) throw DimensionError("luma expects C x H x W");
  if (frame.extent(0) == 1) return frame;
  if (frame.extent(0) != 3) {
    throw DimensionError("luma needs 1 or 3 channels, got " + std::to_string(frame.extent(0)));
  }
  const std::size_t h = frame.extent(1), w = frame.extent(2);
  BasicTensor<T> y({1, h, w});
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      y(0, r, c) = static_cast<T>(0.299 * frame(0, r, c) + 0.587 * frame(1, r, c) +
                                  0.114 * frame(2, r, c));
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// SSIM with an 11x11 Gaussian window (sigma 1.5), k1 = 0.01, k2 = 0.03 and
// dynamic range 1, averaged over every window position fully inside the
// frame. Inputs are single-channel (H x W or 1 x H x W).

inline constexpr std::size_t kSsimWindow = 11;

template <typename T>
double ssim(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  a.require_same_shape(b, "ssim");
  std::size_t h = 0, w = 0;
  if (a.rank() == 2) {
    h = a.extent(0);
    w = a.extent(1);
  } else if (a.rank() == 3 && a.extent(0) == 1) {
    h = a.extent(1);
    w = a.extent(2);
  } else {
    throw DimensionError("ssim expects a single-channel frame, got " + shape_string(a.shape()));
  }
  if (h < kSsimWindow || w < kSsimWindow) {
    throw ParameterError("frame " + std::to_string(h) + "x" + std::to_string(w) +
                         " is smaller than the 11x11 SSIM window");
  }
  constexpr double sigma = 1.5;
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double g1[kSsimWindow];
  double gsum = 0.0;
  for (std::size_t k = 0; k < kSsimWindow; ++k) {
    const double d = static_cast<double>(k) - 5.0;
    g1[k] = std::exp(-d * d / (2.0 * sigma * sigma));
    gsum += g1[k];
  }
  for (double& g : g1) g /= gsum;

  const auto pa = a.data();
  const auto pb = b.data();
  double total = 0.0;
  const std::size_t oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t ky = 0; ky < kSsimWindow; ++ky) {
        for (std::size_t kx = 0; kx < kSsimWindow; ++kx) {
          const double g = g1[ky] * g1[kx];
          const double va = pa[(y + ky) * w + x + kx];
          const double vb = pb[(y + ky) * w + x + kx];
          ma += g * va;
          mb += g * vb;
          saa += g * va * va;
          sbb += g * vb * vb;
          sab += g * va * vb;
        }
      }
      const double var_a = saa - ma * ma;
      const double var_b = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
  }
  return total / static_cast<double>(oh * ow);
}

// ---------------------------------------------------------------------------
// Frequency-band spectrum. Band d collects DCT coefficients with u + v == d,
// so a B x B block has bands 0 .. 2B-2.

enum class SpectrumMode { kAmplitude, kEnergy };

struct SpectrumBand {
  std::size_t band = 0;
  double value = 0.0;       // mean |coef| or mean coef^2 over the band
  std::size_t count = 0;    // coefficients that contributed
};

inline std::size_t band_count(std::size_t block) { return 2 * block - 1; }

template <typename T>
std::vector<SpectrumBand> amplitude_spectrum(const BasicTensor<T>& frame, std::size_t block,
                                             std::size_t lo, std::size_t hi,
                                             SpectrumMode mode = SpectrumMode::kAmplitude) {
  if (block == 0) throw ParameterError("block size must be >= 1");
  const std::size_t last = band_count(block) - 1;
  if (lo > hi || lo > last) {
    throw ParameterError("band range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] selects no band of " + std::to_string(block) + "x" +
                         std::to_string(block) + " blocks");
  }
  hi = std::min(hi, last);
  const auto padded = pad_edge(frame, block);
  const auto map = frame_to_spectral(padded.frame, block);
  const std::size_t per_freq = map.channels() * map.grid_height() * map.grid_width();
  std::vector<SpectrumBand> bands;
  for (std::size_t d = lo; d <= hi; ++d) {
    SpectrumBand band{d, 0.0, 0};
    for (std::size_t u = 0; u < block; ++u) {
      if (d < u || d - u >= block) continue;
      const std::size_t f = u * block + (d - u);
      for (std::size_t k = 0; k < per_freq; ++k) {
        const double c = map.data[f * per_freq + k];
        band.value += mode == SpectrumMode::kAmplitude ? std::abs(c) : c * c;
      }
      band.count += per_freq;
    }
    band.value /= static_cast<double>(band.count);
    bands.push_back(band);
  }
  return bands;
}

// Mean amplitude over bands strictly above `threshold`.
template <typename T>
double high_band_amplitude(const BasicTensor<T>& frame, std::size_t block,
                           std::size_t threshold) {
  const auto bands = amplitude_spectrum(frame, block, threshold + 1, band_count(block) - 1);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& b : bands) {
    sum += b.value * static_cast<double>(b.count);
    n += b.count;
  }
  return sum / static_cast<double>(n);
}

}  // namespace fqt

#endif  // FQT_METRICS_HPP_
