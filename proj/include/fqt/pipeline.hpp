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

#ifndef FQT_PIPELINE_HPP_
#define FQT_PIPELINE_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fqt/attention.hpp"
#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/numerics.hpp"
#include "fqt/tensor.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/weights.hpp"

namespace fqt {

struct PipelineConfig {
  TokenizerConfig tokens;
  std::size_t channels = 3;
  Scheme scheme = Scheme::kST;
  float d_k = 0.0f;  // 0 selects the token vector length
  std::size_t layers = 1;
  bool use_ffn = true;
  // Hidden states kept for temporal attention; 1 replaces the state every
  // frame, larger values keep a sliding window.
  std::size_t history_depth = 1;
  bool bidirectional = false;
  std::size_t tiles = 1;  // g for a g x g tiling of each LR frame
  int threads = 1;
  // Forces every attention output to zero. Only meaningful for wiring tests.
  bool zero_attention = false;

  WeightDims weight_dims(std::size_t ffn_hidden, bool projections) const {
    return {channels, tokens.block, tokens.kernel, ffn_hidden, projections};
  }

  void validate() const {
    if (tokens.alpha == 0 || tokens.block == 0 || tokens.kernel == 0) {
      throw ParameterError("alpha, block size and kernel size must be >= 1");
    }
    if (channels == 0) throw ParameterError("channel count must be >= 1");
    if (tiles == 0) throw ParameterError("tile grid must be >= 1");
    if (history_depth == 0) throw ParameterError("history depth must be >= 1");
    if (layers == 0) throw ParameterError("layer count must be >= 1");
    if (threads <= 0) throw ParameterError("thread count must be >= 1");
  }
};

// Per-pixel displacement (dx, dy), stored as a 2 x H x W tensor.
struct FlowField {
  Tensor data;

  static FlowField zeros(std::size_t h, std::size_t w) { return {Tensor({2, h, w})}; }
  std::size_t height() const { return data.extent(1); }
  std::size_t width() const { return data.extent(2); }
};

// Converts a flow in HR pixel units to spectral-grid units: B x B average
// pooling of the field, and displacements divided by B.
inline FlowField downscale_flow(const FlowField& hr, std::size_t block) {
  if (hr.data.rank() != 3 || hr.data.extent(0) != 2) {
    throw DimensionError("flow must be 2 x H x W, got " + shape_string(hr.data.shape()));
  }
  if (hr.height() % block || hr.width() % block) {
    throw DimensionError("flow " + shape_string(hr.data.shape()) +
                         " is not divisible into " + std::to_string(block) + "px cells");
  }
  const std::size_t gh = hr.height() / block, gw = hr.width() / block;
  FlowField out = FlowField::zeros(gh, gw);
  const double norm = 1.0 / (static_cast<double>(block) * block * block);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t gy = 0; gy < gh; ++gy) {
      for (std::size_t gx = 0; gx < gw; ++gx) {
        double acc = 0.0;
        for (std::size_t y = 0; y < block; ++y) {
          for (std::size_t x = 0; x < block; ++x) {
            acc += hr.data(c, gy * block + y, gx * block + x);
          }
        }
        out.data(c, gy, gx) = static_cast<float>(acc * norm);
      }
    }
  }
  return out;
}

// Warps a spectral map by a grid-unit flow: out[p] = map[p + flow[p]] with
// bilinear interpolation, applied to all F x C features at each position.
inline SpectralMap flow_warp(const SpectralMap& map, const FlowField& flow) {
  map.validate();
  const std::size_t gh = map.grid_height(), gw = map.grid_width();
  if (flow.data.shape() != Shape{2, gh, gw}) {
    throw DimensionError("flow " + shape_string(flow.data.shape()) +
                         " does not match spectral grid " + std::to_string(gh) + "x" +
                         std::to_string(gw));
  }
  Tensor coords({2, gh, gw});
  for (std::size_t y = 0; y < gh; ++y) {
    for (std::size_t x = 0; x < gw; ++x) {
      coords(0, y, x) = static_cast<float>(x) + flow.data(0, y, x);
      coords(1, y, x) = static_cast<float>(y) + flow.data(1, y, x);
    }
  }
  const std::size_t features = map.frequencies() * map.channels();
  Tensor warped = bilinear_sample(map.data.reshaped({features, gh, gw}), coords);
  return {warped.reshaped(map.data.shape()), map.block};
}

// Recurrent state carried between frames. `maps` holds the most recent
// hidden maps (oldest first); `inputs` the matching spectral maps of the
// upsampled inputs, used by the joint scheme. Before the first frame the
// state is a single zero map and contributes no temporal keys.
struct HiddenState {
  std::vector<SpectralMap> maps;
  std::vector<SpectralMap> inputs;
  std::size_t frames_seen = 0;

  static HiddenState initial(std::size_t block, std::size_t channels,
                             std::size_t grid_h, std::size_t grid_w) {
    HiddenState h;
    h.maps.push_back(SpectralMap::zeros(block, channels, grid_h, grid_w));
    return h;
  }

  bool primed() const { return frames_seen > 0; }
};

struct StepResult {
  Tensor sr;
  HiddenState hidden;
};

namespace detail {

inline AttentionContext attention_context(const PipelineConfig& cfg,
                                          const ModelWeights& w) {
  AttentionContext ctx;
  ctx.d_k = cfg.d_k;
  ctx.layers = cfg.layers;
  ctx.threads = cfg.threads;
  ctx.ffn = cfg.use_ffn ? &w.attention.ffn : nullptr;
  ctx.projections = w.attention.projections ? &*w.attention.projections : nullptr;
  return ctx;
}

inline void check_setup(const PipelineConfig& cfg, const ModelWeights& w) {
  cfg.validate();
  try {
    check_weight_dims(w, cfg.weight_dims(w.attention.ffn.hidden(),
                                         w.attention.projections.has_value()));
  } catch (const DimensionError& e) {
    throw ParameterError(std::string("weights do not fit the configuration (") +
                         e.what() + ")");
  }
}

}  // namespace detail

// Zero state sized for LR frames of height x width under `cfg`.
inline HiddenState initial_hidden(const PipelineConfig& cfg, std::size_t height,
                                  std::size_t width) {
  const std::size_t div = cfg.tokens.lr_divisor();
  const std::size_t hr_h = round_up(height, div) * cfg.tokens.alpha;
  const std::size_t hr_w = round_up(width, div) * cfg.tokens.alpha;
  return HiddenState::initial(cfg.tokens.block, cfg.channels, hr_h / cfg.tokens.block,
                              hr_w / cfg.tokens.block);
}

// One recurrent step for LR frame number t:
//   warp the previous hidden state by the flow,
//   build queries from the bicubic upsample and keys/values from the
//   upsampling network, run the attention scheme to get P,
//   hidden' = fuse(D, P), sr = rDCT(fuse(P, D) + D).
// `flow_hr` is in HR pixel units on the (padded) HR grid; nullopt means zero
// flow.
inline StepResult step(const Tensor& lr_frame, const HiddenState& hidden_prev,
                       const std::optional<FlowField>& flow_hr,
                       const ModelWeights& weights, const PipelineConfig& cfg,
                       std::size_t t = 0) {
  detail::check_setup(cfg, weights);
  if (lr_frame.rank() != 3 || lr_frame.extent(0) != cfg.channels) {
    throw DimensionError("LR frame " + shape_string(lr_frame.shape()) + " does not have " +
                         std::to_string(cfg.channels) + " channels");
  }
  const auto& tc = cfg.tokens;
  const auto padded = pad_edge(lr_frame, tc.lr_divisor());
  const std::size_t hr_h = padded.record.padded_height * tc.alpha;
  const std::size_t hr_w = padded.record.padded_width * tc.alpha;
  const Shape grid_shape{tc.block * tc.block, cfg.channels, hr_h / tc.block,
                         hr_w / tc.block};
  if (hidden_prev.maps.empty() || hidden_prev.maps.front().data.shape() != grid_shape) {
    throw ParameterError("hidden state does not match the frame configuration");
  }

  std::vector<SpectralMap> warped = hidden_prev.maps;
  if (flow_hr) {
    FlowField flow = *flow_hr;
    if (flow.data.rank() != 3 || flow.data.extent(0) != 2) {
      throw DimensionError("flow must be 2 x H x W, got " + shape_string(flow.data.shape()));
    }
    if (flow.height() != hr_h || flow.width() != hr_w) {
      // A flow for the unpadded HR frame is extended like the frame itself.
      if (flow.height() != lr_frame.extent(1) * tc.alpha ||
          flow.width() != lr_frame.extent(2) * tc.alpha) {
        throw DimensionError("flow " + shape_string(flow.data.shape()) +
                             " does not match the HR frame " + std::to_string(hr_h) +
                             "x" + std::to_string(hr_w));
      }
      Tensor grown({2, hr_h, hr_w});
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t y = 0; y < hr_h; ++y) {
          for (std::size_t x = 0; x < hr_w; ++x) {
            grown(c, y, x) = flow.data(c, std::min(y, flow.height() - 1),
                                       std::min(x, flow.width() - 1));
          }
        }
      }
      flow.data = std::move(grown);
    }
    const FlowField grid_flow = downscale_flow(flow, tc.block);
    for (auto& m : warped) m = flow_warp(m, grid_flow);
  }

  std::vector<TemporalSource> refs;
  if (hidden_prev.primed()) {
    const auto& past = cfg.scheme == Scheme::kTxS ? hidden_prev.inputs : warped;
    if (t < past.size()) {
      throw ParameterError("frame index " + std::to_string(t) + " precedes " +
                           std::to_string(past.size()) + " stored states");
    }
    for (std::size_t k = 0; k < past.size(); ++k) {
      refs.push_back({t - past.size() + k, past[k]});
    }
  }
  QkvBundle qkv = build_qkv(padded.frame, t, weights, tc, refs);

  SpectralMap p_map;
  if (cfg.zero_attention) {
    p_map = SpectralMap{Tensor(qkv.d_lr.data.shape()), tc.block};
  } else {
    const auto ctx = detail::attention_context(cfg, weights);
    const TokenSet p = apply_scheme(cfg.scheme, qkv.queries, qkv.spatial_keys,
                                    qkv.spatial_values, qkv.temporal_keys,
                                    qkv.temporal_values, ctx);
    p_map = detokenize(p).front();
  }

  const Tensor& reduction = weights.attention.fusion;
  StepResult result;
  result.hidden.frames_seen = hidden_prev.frames_seen + 1;
  if (hidden_prev.primed()) {
    result.hidden.maps = std::move(warped);
    result.hidden.inputs = hidden_prev.inputs;
  }
  result.hidden.maps.push_back(fuse(qkv.d_lr, p_map, reduction));
  result.hidden.inputs.push_back(qkv.d_lr);
  auto trim = [&](std::vector<SpectralMap>& v) {
    if (v.size() > cfg.history_depth) {
      v.erase(v.begin(), v.end() - static_cast<std::ptrdiff_t>(cfg.history_depth));
    }
  };
  trim(result.hidden.maps);
  trim(result.hidden.inputs);

  SpectralMap out = fuse(p_map, qkv.d_lr, reduction);
  out.data += qkv.d_lr.data;
  const Tensor sr_padded = spectral_to_frame(out);
  result.sr = crop(sr_padded, lr_frame.extent(1) * tc.alpha, lr_frame.extent(2) * tc.alpha);
  result.sr.require_finite("pipeline step");
  return result;
}

using VideoSequence = std::vector<Tensor>;

namespace detail {

struct TileBounds {
  std::size_t y0, y1, x0, x1;
};

inline std::vector<TileBounds> tile_grid(std::size_t h, std::size_t w, std::size_t g) {
  std::vector<TileBounds> tiles;
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) {
      tiles.push_back({r * h / g, (r + 1) * h / g, c * w / g, (c + 1) * w / g});
    }
  }
  return tiles;
}

inline Tensor crop_region(const Tensor& t, std::size_t y0, std::size_t y1,
                          std::size_t x0, std::size_t x1) {
  Tensor out({t.extent(0), y1 - y0, x1 - x0});
  for (std::size_t c = 0; c < t.extent(0); ++c) {
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = x0; x < x1; ++x) out(c, y - y0, x - x0) = t(c, y, x);
    }
  }
  return out;
}

inline void paste_region(Tensor& dst, const Tensor& src, std::size_t y0, std::size_t x0) {
  for (std::size_t c = 0; c < src.extent(0); ++c) {
    for (std::size_t y = 0; y < src.extent(1); ++y) {
      for (std::size_t x = 0; x < src.extent(2); ++x) dst(c, y0 + y, x0 + x) = src(c, y, x);
    }
  }
}

inline void check_tiling(const PipelineConfig& cfg, std::size_t h, std::size_t w) {
  const std::size_t g = cfg.tiles;
  if (g == 0) throw ParameterError("tile grid must be >= 1");
  const std::size_t min_lr = std::min(h / g, w / g);
  const std::size_t need = cfg.tokens.block * cfg.tokens.kernel;
  if (min_lr * cfg.tokens.alpha < need) {
    throw ParameterError("a " + std::to_string(g) + "x" + std::to_string(g) +
                         " tiling leaves tiles of " + std::to_string(min_lr * cfg.tokens.alpha) +
                         " HR pixels, smaller than one " + std::to_string(need) +
                         "-pixel token block");
  }
}

// Forward recurrence over `frames` in the given order. flows[k] (HR units)
// warps the state carried into frames[k].
inline VideoSequence run_direction(const VideoSequence& frames,
                                   const std::vector<FlowField>* flows,
                                   const ModelWeights& weights, const PipelineConfig& cfg) {
  const std::size_t h = frames.front().extent(1), w = frames.front().extent(2);
  const std::size_t alpha = cfg.tokens.alpha;
  const auto tiles = tile_grid(h, w, cfg.tiles);
  std::vector<HiddenState> hidden;
  for (const auto& tb : tiles) {
    hidden.push_back(initial_hidden(cfg, tb.y1 - tb.y0, tb.x1 - tb.x0));
  }
  VideoSequence out;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    Tensor sr({frames[t].extent(0), h * alpha, w * alpha});
    for (std::size_t k = 0; k < tiles.size(); ++k) {
      const auto& tb = tiles[k];
      const Tensor lr = tiles.size() == 1 ? frames[t]
                                          : crop_region(frames[t], tb.y0, tb.y1, tb.x0, tb.x1);
      std::optional<FlowField> flow;
      if (flows && t > 0) {
        const FlowField& full = (*flows)[t];
        if (full.height() != h * alpha || full.width() != w * alpha) {
          throw DimensionError("flow " + shape_string(full.data.shape()) +
                               " does not match the HR frame size");
        }
        flow = tiles.size() == 1 ? full
                                 : FlowField{crop_region(full.data, tb.y0 * alpha, tb.y1 * alpha,
                                                         tb.x0 * alpha, tb.x1 * alpha)};
      }
      StepResult r = step(lr, hidden[k], flow, weights, cfg, t);
      hidden[k] = std::move(r.hidden);
      if (tiles.size() == 1) {
        sr = std::move(r.sr);
      } else {
        paste_region(sr, r.sr, tb.y0 * alpha, tb.x0 * alpha);
      }
    }
    out.push_back(std::move(sr));
  }
  return out;
}

}  // namespace detail

// Restores a compressed LR sequence. Without flows the state is carried
// unwarped. In bidirectional mode a second, independent pass runs over the
// reversed sequence and each output frame is the mean of both passes;
// `backward_flows`, when given, are indexed like the reversed sequence.
inline VideoSequence run_sequence(const VideoSequence& video,
                                  const std::vector<FlowField>* flows,
                                  const ModelWeights& weights, const PipelineConfig& cfg,
                                  const std::vector<FlowField>* backward_flows = nullptr) {
  if (video.empty()) throw ParameterError("cannot restore an empty sequence");
  detail::check_setup(cfg, weights);
  for (const auto& f : video) {
    if (f.shape() != video.front().shape()) {
      throw DimensionError("frames differ in shape: " + shape_string(f.shape()) + " vs " +
                           shape_string(video.front().shape()));
    }
  }
  if (flows && flows->size() != video.size()) {
    throw DimensionError("expected one flow per frame");
  }
  if (backward_flows && backward_flows->size() != video.size()) {
    throw DimensionError("expected one backward flow per frame");
  }
  detail::check_tiling(cfg, video.front().extent(1), video.front().extent(2));
  VideoSequence forward = detail::run_direction(video, flows, weights, cfg);
  if (!cfg.bidirectional) return forward;

  VideoSequence reversed(video.rbegin(), video.rend());
  VideoSequence backward = detail::run_direction(reversed, backward_flows, weights, cfg);
  std::reverse(backward.begin(), backward.end());
  for (std::size_t t = 0; t < forward.size(); ++t) {
    forward[t] += backward[t];
    forward[t] *= 0.5f;
  }
  return forward;
}

// Single-frame restoration on a g x g grid of independently processed LR
// tiles, each edge-padded as needed and reassembled in HR space.
inline Tensor tiled_inference(const Tensor& frame, const ModelWeights& weights,
                              PipelineConfig cfg, std::size_t tiles) {
  cfg.tiles = tiles;
  cfg.bidirectional = false;
  return run_sequence(VideoSequence{frame}, nullptr, weights, cfg).front();
}

}  // namespace fqt

#endif  // FQT_PIPELINE_HPP_
