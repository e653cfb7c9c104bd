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

#ifndef FQT_UPSAMPLER_HPP_
#define FQT_UPSAMPLER_HPP_

#include <algorithm>
#include <cstddef>

#include "fqt/numerics.hpp"
#include "fqt/tensor.hpp"
#include "fqt/weights.hpp"

namespace fqt {

// 3x3 convolution with edge-replicated borders; kernel is Cout x Cin x 3 x 3.
inline Tensor conv3x3(const Tensor& image, const Tensor& kernel) {
  const std::size_t cin = image.extent(0);
  if (kernel.rank() != 4 || kernel.extent(1) != cin || kernel.extent(2) != 3 ||
      kernel.extent(3) != 3) {
    throw DimensionError("conv3x3 kernel " + shape_string(kernel.shape()) +
                         " does not fit image " + shape_string(image.shape()));
  }
  const std::size_t cout = kernel.extent(0);
  const long h = static_cast<long>(image.extent(1));
  const long w = static_cast<long>(image.extent(2));
  Tensor out({cout, image.extent(1), image.extent(2)});
  for (std::size_t o = 0; o < cout; ++o) {
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        float acc = 0.0f;
        for (std::size_t i = 0; i < cin; ++i) {
          for (long ky = 0; ky < 3; ++ky) {
            const auto sy = static_cast<std::size_t>(std::clamp(y + ky - 1, 0L, h - 1));
            for (long kx = 0; kx < 3; ++kx) {
              const auto sx = static_cast<std::size_t>(std::clamp(x + kx - 1, 0L, w - 1));
              acc += kernel(o, i, ky, kx) * image(i, sy, sx);
            }
          }
        }
        out(o, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
      }
    }
  }
  return out;
}

// Toy stand-in for the learned upsampler: bicubic upsampling by `alpha`
// refined by one residual 3x3 convolution.
inline Tensor upsample_network(const Tensor& lr, const UpsamplerWeights& weights,
                               std::size_t alpha) {
  Tensor up = bicubic_resize(lr, ScaleFactor{static_cast<int>(alpha), 1});
  up += conv3x3(up, weights.kernel);
  up.require_finite("upsample_network");
  return up;
}

}  // namespace fqt

#endif  // FQT_UPSAMPLER_HPP_
