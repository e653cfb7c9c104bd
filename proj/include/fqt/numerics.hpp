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

#ifndef FQT_NUMERICS_HPP_
#define FQT_NUMERICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fqt/error.hpp"
#include "fqt/tensor.hpp"

namespace fqt {

// c = a * b for row-major matrices. Every output element accumulates its
// products in ascending inner index, so results are reproducible bit for bit.
template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError("matmul expects matrices, got " +
                         shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  if (b.extent(0) != k) {
    throw DimensionError("matmul inner extents differ: " +
                         shape_string(a.shape()) + " * " +
                         shape_string(b.shape()));
  }
  BasicTensor<T> c({m, n});
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* pc = c.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    T* row = pc + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = pa[i * k + p];
      const T* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
  c.require_finite("matmul");
  return c;
}

// y = W x for W of shape rows x cols.
template <typename T>
void matvec(const BasicTensor<T>& w, std::span<const T> x, std::span<T> y) {
  const std::size_t rows = w.extent(0), cols = w.extent(1);
  if (x.size() != cols || y.size() != rows) {
    throw DimensionError("matvec: matrix " + shape_string(w.shape()) +
                         " with vector of length " + std::to_string(x.size()));
  }
  const T* pw = w.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    T acc = 0;
    for (std::size_t c = 0; c < cols; ++c) acc += pw[r * cols + c] * x[c];
    y[r] = acc;
  }
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot of lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
  T acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Overflow-safe softmax of v * scale.
template <typename T>
std::vector<T> softmax(std::span<const T> v, T scale = T{1}) {
  if (v.empty()) throw DimensionError("softmax of an empty vector");
  if (!(scale > 0)) throw ParameterError("softmax scale must be positive");
  T vmax = v[0];
  for (T x : v) {
    if (!std::isfinite(x)) throw NumericError("softmax input is not finite");
    vmax = std::max(vmax, x);
  }
  const T shift = vmax * scale;
  std::vector<T> out(v.size());
  T total = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = std::exp(v[j] * scale - shift);
    total += out[j];
  }
  for (T& o : out) o /= total;
  return out;
}

template <typename T>
std::vector<T> softmax(const std::vector<T>& v, T scale = T{1}) {
  return softmax(std::span<const T>(v), scale);
}

// Samples `field` (C x H x W) at absolute positions coords[0] = x and
// coords[1] = y (2 x H' x W'). Each of the four bilinear taps that falls
// outside the field contributes zero.
template <typename T>
BasicTensor<T> bilinear_sample(const BasicTensor<T>& field,
                               const BasicTensor<T>& coords) {
  if (field.rank() != 3 || coords.rank() != 3 || coords.extent(0) != 2) {
    throw DimensionError("bilinear_sample expects C x H x W field and 2 x H x "
                         "W coords, got " + shape_string(field.shape()) +
                         " and " + shape_string(coords.shape()));
  }
  const std::size_t channels = field.extent(0);
  const long height = static_cast<long>(field.extent(1));
  const long width = static_cast<long>(field.extent(2));
  const std::size_t out_h = coords.extent(1), out_w = coords.extent(2);
  BasicTensor<T> out({channels, out_h, out_w});
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      const double x = coords(0, oy, ox);
      const double y = coords(1, oy, ox);
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw NumericError("bilinear_sample coordinate is not finite");
      }
      const double fx = std::floor(x), fy = std::floor(y);
      const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
      const double wx1 = x - fx, wy1 = y - fy;
      const double wx[2] = {1.0 - wx1, wx1};
      const double wy[2] = {1.0 - wy1, wy1};
      for (std::size_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int dy = 0; dy < 2; ++dy) {
          const long yy = y0 + dy;
          if (yy < 0 || yy >= height || wy[dy] == 0.0) continue;
          for (int dx = 0; dx < 2; ++dx) {
            const long xx = x0 + dx;
            if (xx < 0 || xx >= width || wx[dx] == 0.0) continue;
            acc += wy[dy] * wx[dx] *
                   static_cast<double>(field(c, static_cast<std::size_t>(yy),
                                             static_cast<std::size_t>(xx)));
          }
        }
        out(c, oy, ox) = static_cast<T>(acc);
      }
    }
  }
  return out;
}

// Positive rational resize factor num/den.
struct ScaleFactor {
  int num = 1;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  std::size_t apply(std::size_t extent) const {
    const auto n = static_cast<std::size_t>(num);
    const auto d = static_cast<std::size_t>(den);
    return (extent * n + d - 1) / d;
  }
  void validate() const {
    if (num <= 0 || den <= 0) {
      throw ParameterError("resize factor must be positive, got " +
                           std::to_string(num) + "/" + std::to_string(den));
    }
  }
};

namespace detail {

// Keys cubic convolution kernel with a = -0.5 (Catmull-Rom).
inline double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

struct ResampleTaps {
  std::vector<std::size_t> first;  // index into `index`/`weight` per output
  std::vector<std::size_t> count;
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

// Taps for mapping an axis of length `in` to `out` samples. Sample centers
// are aligned (half-pixel convention). When shrinking, the kernel is widened
// by 1/factor so it low-passes before decimation.
inline ResampleTaps resample_taps(std::size_t in, std::size_t out,
                                  double factor) {
  ResampleTaps taps;
  const double support_scale = factor < 1.0 ? 1.0 / factor : 1.0;
  const double support = 2.0 * support_scale;
  const long last = static_cast<long>(in) - 1;
  for (std::size_t o = 0; o < out; ++o) {
    const double center = (static_cast<double>(o) + 0.5) / factor - 0.5;
    const long lo = static_cast<long>(std::floor(center - support)) + 1;
    const long hi = static_cast<long>(std::floor(center + support));
    taps.first.push_back(taps.index.size());
    double total = 0.0;
    const std::size_t start = taps.weight.size();
    for (long t = lo; t <= hi; ++t) {
      const double w =
          cubic_kernel((static_cast<double>(t) - center) / support_scale);
      if (w == 0.0) continue;
      taps.index.push_back(static_cast<std::size_t>(std::clamp(t, 0L, last)));
      taps.weight.push_back(w);
      total += w;
    }
    taps.count.push_back(taps.weight.size() - start);
    if (factor < 1.0) {
      for (std::size_t k = start; k < taps.weight.size(); ++k) {
        taps.weight[k] /= total;
      }
    }
  }
  return taps;
}

}  // namespace detail

// Catmull-Rom bicubic resize of a C x H x W image by `factor`, replicating
// edge pixels outside the image. The output is C x ceil(f H) x ceil(f W).
template <typename T>
BasicTensor<T> bicubic_resize(const BasicTensor<T>& image, ScaleFactor factor) {
  factor.validate();
  if (image.rank() != 3) {
    throw DimensionError("bicubic_resize expects C x H x W, got " +
                         shape_string(image.shape()));
  }
  const std::size_t channels = image.extent(0);
  const std::size_t in_h = image.extent(1), in_w = image.extent(2);
  const std::size_t out_h = factor.apply(in_h), out_w = factor.apply(in_w);
  if (factor.num == factor.den) return image;
  const double f = factor.value();
  const auto taps_x = detail::resample_taps(in_w, out_w, f);
  const auto taps_y = detail::resample_taps(in_h, out_h, f);

  std::vector<double> rows(channels * in_h * out_w);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < in_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        const std::size_t first = taps_x.first[x];
        for (std::size_t k = 0; k < taps_x.count[x]; ++k) {
          acc += taps_x.weight[first + k] *
                 static_cast<double>(image(c, y, taps_x.index[first + k]));
        }
        rows[(c * in_h + y) * out_w + x] = acc;
      }
    }
  }
  BasicTensor<T> out({channels, out_h, out_w});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < out_h; ++y) {
      const std::size_t first = taps_y.first[y];
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps_y.count[y]; ++k) {
          acc += taps_y.weight[first + k] *
                 rows[(c * in_h + taps_y.index[first + k]) * out_w + x];
        }
        out(c, y, x) = static_cast<T>(acc);
      }
    }
  }
  out.require_finite("bicubic_resize");
  return out;
}

}  // namespace fqt

#endif  // FQT_NUMERICS_HPP_
