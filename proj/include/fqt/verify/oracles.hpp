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

#ifndef FQT_VERIFY_ORACLES_HPP_
#define FQT_VERIFY_ORACLES_HPP_

// Slow reference implementations used only by tests and selftest. They are
// written directly from the defining formulas and share no code with the
// production paths beyond the tensor container.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "fqt/attention.hpp"
#include "fqt/tensor.hpp"

namespace fqt::oracle {

// Quadruple-loop 2-D DCT-II of a B x B block.
inline Tensor64 dct_direct(const Tensor64& p) {
  const std::size_t b = p.extent(0);
  const double n = static_cast<double>(b);
  std::vector<double> cosines(b * b);
  for (std::size_t u = 0; u < b; ++u) {
    for (std::size_t x = 0; x < b; ++x) {
      cosines[u * b + x] = std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n));
    }
  }
  Tensor64 d({b, b});
  for (std::size_t u = 0; u < b; ++u) {
    for (std::size_t v = 0; v < b; ++v) {
      const double cu = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      const double cv = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double acc = 0.0;
      for (std::size_t x = 0; x < b; ++x) {
        for (std::size_t y = 0; y < b; ++y) {
          acc += p(x, y) * cosines[u * b + x] * cosines[v * b + y];
        }
      }
      d(u, v) = cu * cv * acc;
    }
  }
  return d;
}

// Spectral map of a C x H x W frame (H, W multiples of b) via dct_direct.
inline Tensor64 spectral_direct(const Tensor64& frame, std::size_t b) {
  const std::size_t c = frame.extent(0), gh = frame.extent(1) / b, gw = frame.extent(2) / b;
  Tensor64 out({b * b, c, gh, gw});
  Tensor64 tile({b, b});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t gy = 0; gy < gh; ++gy) {
      for (std::size_t gx = 0; gx < gw; ++gx) {
        for (std::size_t x = 0; x < b; ++x) {
          for (std::size_t y = 0; y < b; ++y) tile(x, y) = frame(ch, gy * b + x, gx * b + y);
        }
        const Tensor64 d = dct_direct(tile);
        for (std::size_t u = 0; u < b; ++u) {
          for (std::size_t v = 0; v < b; ++v) out(u * b + v, ch, gy, gx) = d(u, v);
        }
      }
    }
  }
  return out;
}

// Catmull-Rom segment through p0..p3 evaluated at s in [0, 1].
inline double catmull_rom(double p0, double p1, double p2, double p3, double s) {
  return 0.5 * (2.0 * p1 + (p2 - p0) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s +
                (3.0 * (p1 - p2) + p3 - p0) * s * s * s);
}

// Integer-factor bicubic upscaling with half-pixel centers and edge clamping.
inline Tensor64 bicubic_upscale(const Tensor64& img, std::size_t factor) {
  const std::size_t c = img.extent(0), h = img.extent(1), w = img.extent(2);
  Tensor64 out({c, h * factor, w * factor});
  auto px = [&](std::size_t ch, long y, long x) {
    y = std::clamp(y, 0L, static_cast<long>(h) - 1);
    x = std::clamp(x, 0L, static_cast<long>(w) - 1);
    return img(ch, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
  };
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < h * factor; ++oy) {
      const double sy = (oy + 0.5) / factor - 0.5;
      const long iy = static_cast<long>(std::floor(sy));
      const double fy = sy - iy;
      for (std::size_t ox = 0; ox < w * factor; ++ox) {
        const double sx = (ox + 0.5) / factor - 0.5;
        const long ix = static_cast<long>(std::floor(sx));
        const double fx = sx - ix;
        double rows[4];
        for (long r = -1; r <= 2; ++r) {
          rows[r + 1] = catmull_rom(px(ch, iy + r, ix - 1), px(ch, iy + r, ix),
                                    px(ch, iy + r, ix + 1), px(ch, iy + r, ix + 2), fx);
        }
        out(ch, oy, ox) = catmull_rom(rows[0], rows[1], rows[2], rows[3], fy);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attention over raw spectral maps (F x C x Hg x Wg), token (i, f) being the
// C x K x K slice at frequency f of block i (row-major blocks).

struct Ffn {
  Tensor64 w1, b1, w2, b2;
};

struct Projections {
  Tensor64 query, key, value;
};

struct AttentionSetup {
  std::size_t kernel = 1;
  double d_k = 0;  // 0 selects C*K*K
  std::size_t layers = 1;
  std::optional<Ffn> ffn;
  std::optional<Projections> projections;
};

inline std::vector<double> token(const Tensor64& map, std::size_t k, std::size_t i,
                                 std::size_t f) {
  const std::size_t cols = map.extent(3) / k;
  const std::size_t by = i / cols, bx = i % cols;
  std::vector<double> v;
  for (std::size_t c = 0; c < map.extent(1); ++c) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t x = 0; x < k; ++x) v.push_back(map(f, c, by * k + y, bx * k + x));
    }
  }
  return v;
}

inline void set_token(Tensor64& map, std::size_t k, std::size_t i, std::size_t f,
                      const std::vector<double>& v) {
  const std::size_t cols = map.extent(3) / k;
  const std::size_t by = i / cols, bx = i % cols;
  std::size_t n = 0;
  for (std::size_t c = 0; c < map.extent(1); ++c) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t x = 0; x < k; ++x) map(f, c, by * k + y, bx * k + x) = v[n++];
    }
  }
}

inline std::vector<double> times(const Tensor64& m, const std::vector<double>& x) {
  std::vector<double> y(m.extent(0), 0.0);
  for (std::size_t r = 0; r < m.extent(0); ++r) {
    for (std::size_t c = 0; c < m.extent(1); ++c) y[r] += m(r, c) * x[c];
  }
  return y;
}

inline std::vector<double> ffn(const std::vector<double>& x, const Ffn& w) {
  std::vector<double> h = times(w.w1, x);
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = h[k] + w.b1[k] > 0 ? h[k] + w.b1[k] : 0.0;
  std::vector<double> y = times(w.w2, h);
  for (std::size_t d = 0; d < y.size(); ++d) y[d] += x[d] + w.b2[d];
  return y;
}

struct Candidate {
  const Tensor64* map;
  std::size_t i, f;
};

inline std::vector<double> attend(const std::vector<double>& q,
                                  const std::vector<Candidate>& cands,
                                  const AttentionSetup& s) {
  std::vector<double> qp = s.projections ? times(s.projections->query, q) : q;
  const double dk = s.d_k > 0 ? s.d_k : static_cast<double>(q.size());
  std::vector<double> logits, weights;
  std::vector<std::vector<double>> vals;
  for (const Candidate& c : cands) {
    std::vector<double> k = token(*c.map, s.kernel, c.i, c.f);
    std::vector<double> v = k;
    if (s.projections) {
      k = times(s.projections->key, k);
      v = times(s.projections->value, v);
    }
    double l = 0.0;
    for (std::size_t d = 0; d < k.size(); ++d) l += qp[d] * k[d];
    logits.push_back(l / std::sqrt(dk));
    vals.push_back(std::move(v));
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) {
    weights.push_back(std::exp(l - m));
    z += weights.back();
  }
  std::vector<double> out(vals.front().size(), 0.0);
  for (std::size_t j = 0; j < vals.size(); ++j) {
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += weights[j] / z * vals[j][d];
  }
  return out;
}

enum class Stage { kSpatial, kSpatialSameFrequency, kTemporal, kTemporalSameFrequency, kJoint };

// One attention stage applied to every token of x.
inline Tensor64 stage(const Tensor64& x, Stage kind, const Tensor64& spatial,
                      const std::vector<Tensor64>& past, const AttentionSetup& s) {
  const std::size_t freqs = x.extent(0);
  const std::size_t blocks = (x.extent(2) / s.kernel) * (x.extent(3) / s.kernel);
  Tensor64 out(x.shape());
  for (std::size_t i = 0; i < blocks; ++i) {
    for (std::size_t f = 0; f < freqs; ++f) {
      std::vector<Candidate> cands;
      switch (kind) {
        case Stage::kSpatial:
          for (std::size_t j = 0; j < blocks; ++j) {
            for (std::size_t g = 0; g < freqs; ++g) cands.push_back({&spatial, j, g});
          }
          break;
        case Stage::kSpatialSameFrequency:
          for (std::size_t j = 0; j < blocks; ++j) cands.push_back({&spatial, j, f});
          break;
        case Stage::kTemporal:
          for (const auto& p : past) {
            for (std::size_t g = 0; g < freqs; ++g) cands.push_back({&p, i, g});
          }
          break;
        case Stage::kTemporalSameFrequency:
          for (const auto& p : past) cands.push_back({&p, i, f});
          break;
        case Stage::kJoint:
          for (const auto& p : past) {
            for (std::size_t j = 0; j < blocks; ++j) {
              for (std::size_t g = 0; g < freqs; ++g) cands.push_back({&p, j, g});
            }
          }
          break;
      }
      std::vector<double> y = attend(token(x, s.kernel, i, f), cands, s);
      if (s.ffn) y = ffn(y, *s.ffn);
      set_token(out, s.kernel, i, f, y);
    }
  }
  return out;
}

inline Tensor64 repeated(Tensor64 x, Stage kind, const Tensor64& spatial,
                         const std::vector<Tensor64>& past, const AttentionSetup& s) {
  for (std::size_t l = 0; l < std::max<std::size_t>(s.layers, 1); ++l) {
    x = stage(x, kind, spatial, past, s);
  }
  return x;
}

// Output map of `scheme` for query map q, spatial key/value map and earlier
// frames `past` (temporal keys/values). Temporal stages are skipped when
// `past` is empty.
inline Tensor64 scheme(Scheme sc, const Tensor64& q, const Tensor64& spatial,
                       const std::vector<Tensor64>& past, const AttentionSetup& s) {
  const bool has_past = !past.empty();
  auto spatial_stage = [&](const Tensor64& x, bool same_f) {
    return repeated(x, same_f ? Stage::kSpatialSameFrequency : Stage::kSpatial, spatial,
                    past, s);
  };
  auto temporal_stage = [&](const Tensor64& x, bool same_f) {
    if (!has_past) return x;
    return repeated(x, same_f ? Stage::kTemporalSameFrequency : Stage::kTemporal, spatial,
                    past, s);
  };
  switch (sc) {
    case Scheme::kS:
      return spatial_stage(q, false);
    case Scheme::kT:
      return temporal_stage(q, false);
    case Scheme::kTxS:
      return has_past ? repeated(q, Stage::kJoint, spatial, past, s) : q;
    case Scheme::kST:
      return temporal_stage(spatial_stage(q, false), false);
    case Scheme::kTS:
      return spatial_stage(temporal_stage(q, false), false);
    case Scheme::kBase:
      return temporal_stage(spatial_stage(q, true), true);
  }
  return q;
}

// Per-position concatenation of both maps' F*C features reduced by m.
inline Tensor64 fuse(const Tensor64& a, const Tensor64& b, const Tensor64& m) {
  const std::size_t F = a.extent(0), C = a.extent(1), H = a.extent(2), W = a.extent(3);
  Tensor64 out(a.shape());
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      std::vector<double> cat;
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t c = 0; c < C; ++c) cat.push_back(a(f, c, y, x));
      }
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t c = 0; c < C; ++c) cat.push_back(b(f, c, y, x));
      }
      const std::vector<double> r = times(m, cat);
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t c = 0; c < C; ++c) out(f, c, y, x) = r[f * C + c];
      }
    }
  }
  return out;
}

// 10 log10(peak^2 / mse), mse over every element.
inline double psnr(const Tensor64& a, const Tensor64& b, double peak) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return 10.0 * std::log10(peak * peak / (s / static_cast<double>(a.size())));
}

}  // namespace fqt::oracle

#endif  // FQT_VERIFY_ORACLES_HPP_
