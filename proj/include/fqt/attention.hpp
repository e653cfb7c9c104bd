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

#ifndef FQT_ATTENTION_HPP_
#define FQT_ATTENTION_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/numerics.hpp"
#include "fqt/parallel.hpp"
#include "fqt/tensor.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/weights.hpp"

namespace fqt {

// Composition of frequency attention over space and time.
//   S     query (i, f) attends to every (i', f') of its own frame
//   T     query (t, i, f) attends to every (t', f') at block i of earlier frames
//   TxS   one softmax over every (t', i', f') of earlier frames
//   ST    S first, its output then queries T
//   TS    T first, its output then queries S
//   Base  ST wiring with each query restricted to its own frequency f' == f
enum class Scheme { kS, kT, kTxS, kTS, kST, kBase };

inline constexpr std::array<Scheme, 6> kAllSchemes = {
    Scheme::kS, Scheme::kT, Scheme::kTxS, Scheme::kTS, Scheme::kST, Scheme::kBase};

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kS: return "S";
    case Scheme::kT: return "T";
    case Scheme::kTxS: return "TxS";
    case Scheme::kTS: return "TS";
    case Scheme::kST: return "ST";
    case Scheme::kBase: return "Base";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

// Everything the scheme operators need besides the tokens themselves.
template <typename T>
struct BasicAttentionContext {
  T d_k = 0;  // softmax normalization; 0 selects the token vector length
  const BasicProjections<T>* projections = nullptr;
  const BasicFfnWeights<T>* ffn = nullptr;  // applied after every stage if set
  std::size_t layers = 1;
  int threads = 1;

  T scale(std::size_t dim) const {
    const T d = d_k > 0 ? d_k : static_cast<T>(dim);
    return T{1} / std::sqrt(d);
  }
};

using AttentionContext = BasicAttentionContext<float>;

template <typename T>
using VectorList = std::vector<std::span<const T>>;

// Softmax weights of q against each key, logits q.k / sqrt(d_k).
template <typename T>
std::vector<T> attention_weights(std::span<const T> q, const VectorList<T>& keys,
                                 T d_k) {
  if (keys.empty()) throw DegenerateInputError("attention over an empty key list");
  if (!(d_k > 0)) throw ParameterError("d_k must be positive");
  std::vector<T> logits(keys.size());
  for (std::size_t j = 0; j < keys.size(); ++j) logits[j] = dot(q, keys[j]);
  return softmax(std::span<const T>(logits), T{1} / std::sqrt(d_k));
}

// sum_j softmax_j(q.k_j / sqrt(d_k)) v_j
template <typename T>
std::vector<T> freq_attention(std::span<const T> q, const VectorList<T>& keys,
                              const VectorList<T>& values, T d_k) {
  if (keys.size() != values.size()) {
    throw DimensionError(std::to_string(keys.size()) + " keys but " +
                         std::to_string(values.size()) + " values");
  }
  const auto w = attention_weights(q, keys, d_k);
  const std::size_t dim = values.front().size();
  std::vector<T> out(dim, T{0});
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j].size() != dim || keys[j].size() != q.size()) {
      throw DimensionError("attention vectors differ in length");
    }
    for (std::size_t d = 0; d < dim; ++d) out[d] += w[j] * values[j][d];
  }
  return out;
}

// Gradients of <probe, freq_attention(q, K, V)> with respect to q, K and V.
template <typename T>
struct AttentionGradients {
  std::vector<T> query;
  std::vector<std::vector<T>> keys;
  std::vector<std::vector<T>> values;
};

template <typename T>
AttentionGradients<T> freq_attention_backward(std::span<const T> q,
                                              const VectorList<T>& keys,
                                              const VectorList<T>& values, T d_k,
                                              std::span<const T> grad_out) {
  const auto w = attention_weights(q, keys, d_k);
  const T scale = T{1} / std::sqrt(d_k);
  const std::size_t n = keys.size();
  std::vector<T> gv(n);
  T mean = 0;
  for (std::size_t j = 0; j < n; ++j) {
    gv[j] = dot(grad_out, values[j]);
    mean += w[j] * gv[j];
  }
  AttentionGradients<T> g;
  g.query.assign(q.size(), T{0});
  g.keys.assign(n, std::vector<T>(q.size()));
  g.values.assign(n, std::vector<T>(grad_out.size()));
  for (std::size_t j = 0; j < n; ++j) {
    const T ds = w[j] * (gv[j] - mean) * scale;
    for (std::size_t d = 0; d < q.size(); ++d) {
      g.query[d] += ds * keys[j][d];
      g.keys[j][d] = ds * q[d];
    }
    for (std::size_t d = 0; d < grad_out.size(); ++d) {
      g.values[j][d] = w[j] * grad_out[d];
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Feed-forward block

template <typename T>
std::vector<T> ffn(std::span<const T> x, const BasicFfnWeights<T>& w) {
  w.validate();
  if (x.size() != w.dim()) {
    throw DimensionError("FFN input length " + std::to_string(x.size()) +
                         ", weights expect " + std::to_string(w.dim()));
  }
  std::vector<T> h(w.hidden());
  matvec(w.w1, x, std::span<T>(h));
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = std::max(h[k] + w.b1[k], T{0});
  std::vector<T> out(x.size());
  matvec(w.w2, std::span<const T>(h), std::span<T>(out));
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += x[d] + w.b2[d];
  return out;
}

template <typename T>
struct FfnGradients {
  std::vector<T> input;
  BasicFfnWeights<T> weights;
};

template <typename T>
FfnGradients<T> ffn_backward(std::span<const T> x, const BasicFfnWeights<T>& w,
                             std::span<const T> grad_out) {
  w.validate();
  const std::size_t dim = w.dim(), hidden = w.hidden();
  if (x.size() != dim || grad_out.size() != dim) {
    throw DimensionError("FFN backward length mismatch");
  }
  std::vector<T> pre(hidden);
  matvec(w.w1, x, std::span<T>(pre));
  for (std::size_t k = 0; k < hidden; ++k) pre[k] += w.b1[k];

  FfnGradients<T> g{std::vector<T>(grad_out.begin(), grad_out.end()),
                    BasicFfnWeights<T>::zeros(dim, hidden)};
  std::vector<T> dh(hidden, T{0});
  for (std::size_t k = 0; k < hidden; ++k) {
    const T act = std::max(pre[k], T{0});
    T acc = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      acc += w.w2(d, k) * grad_out[d];
      g.weights.w2(d, k) = grad_out[d] * act;
    }
    dh[k] = pre[k] > 0 ? acc : T{0};
    g.weights.b1[k] = dh[k];
  }
  for (std::size_t d = 0; d < dim; ++d) g.weights.b2[d] = grad_out[d];
  for (std::size_t k = 0; k < hidden; ++k) {
    for (std::size_t d = 0; d < dim; ++d) {
      g.weights.w1(k, d) = dh[k] * x[d];
      g.input[d] += w.w1(k, d) * dh[k];
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Fusion: per grid position, concatenate the F*C features of both maps and
// reduce back to F*C with one linear map.

namespace detail {

template <typename T>
void require_fusable(const BasicSpectralMap<T>& a, const BasicSpectralMap<T>& b,
                     const BasicTensor<T>& m) {
  a.validate();
  b.validate();
  if (a.data.shape() != b.data.shape()) {
    throw DimensionError("fusion inputs differ: " + shape_string(a.data.shape()) +
                         " vs " + shape_string(b.data.shape()));
  }
  const std::size_t width = a.frequencies() * a.channels();
  if (m.shape() != Shape{width, 2 * width}) {
    throw DimensionError("fusion matrix " + shape_string(m.shape()) +
                         " does not reduce 2x" + std::to_string(width) + " features");
  }
}

}  // namespace detail

template <typename T>
BasicSpectralMap<T> fuse(const BasicSpectralMap<T>& first,
                         const BasicSpectralMap<T>& second,
                         const BasicTensor<T>& reduction) {
  detail::require_fusable(first, second, reduction);
  const std::size_t width = first.frequencies() * first.channels();
  const std::size_t positions = first.grid_height() * first.grid_width();
  BasicSpectralMap<T> out{BasicTensor<T>(first.data.shape()), first.block};
  const T* pa = first.data.data().data();
  const T* pb = second.data.data().data();
  const T* pm = reduction.data().data();
  T* po = out.data.data().data();
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t r = 0; r < width; ++r) {
      const T* row = pm + r * 2 * width;
      T acc = 0;
      for (std::size_t c = 0; c < width; ++c) acc += row[c] * pa[c * positions + p];
      for (std::size_t c = 0; c < width; ++c) {
        acc += row[width + c] * pb[c * positions + p];
      }
      po[r * positions + p] = acc;
    }
  }
  out.data.require_finite("fuse");
  return out;
}

template <typename T>
struct FuseGradients {
  BasicSpectralMap<T> first;
  BasicSpectralMap<T> second;
  BasicTensor<T> reduction;
};

template <typename T>
FuseGradients<T> fuse_backward(const BasicSpectralMap<T>& first,
                               const BasicSpectralMap<T>& second,
                               const BasicTensor<T>& reduction,
                               const BasicSpectralMap<T>& grad_out) {
  detail::require_fusable(first, second, reduction);
  if (grad_out.data.shape() != first.data.shape()) {
    throw DimensionError("fusion gradient shape mismatch");
  }
  const std::size_t width = first.frequencies() * first.channels();
  const std::size_t positions = first.grid_height() * first.grid_width();
  FuseGradients<T> g{{BasicTensor<T>(first.data.shape()), first.block},
                     {BasicTensor<T>(first.data.shape()), first.block},
                     BasicTensor<T>(reduction.shape())};
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t r = 0; r < width; ++r) {
      const T go = grad_out.data[r * positions + p];
      for (std::size_t c = 0; c < width; ++c) {
        g.reduction(r, c) += go * first.data[c * positions + p];
        g.reduction(r, width + c) += go * second.data[c * positions + p];
        g.first.data[c * positions + p] += reduction(r, c) * go;
        g.second.data[c * positions + p] += reduction(r, width + c) * go;
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Scheme operators over token sets

namespace detail {

struct TokenIndex {
  std::size_t t, i, f;
};

template <typename T>
BasicTokenSet<T> project(const BasicTokenSet<T>& set, const BasicTensor<T>& m,
                         int threads) {
  std::vector<BasicFrequencyToken<T>> out(set.size());
  const auto tokens = set.tokens();
  parallel_for(tokens.size(), threads, [&](std::size_t k) {
    const auto& tok = tokens[k];
    BasicTensor<T> payload(tok.payload.shape());
    matvec(m, tok.vec(), payload.data());
    out[k] = {tok.t, tok.i, tok.f, std::move(payload)};
  });
  BasicTokenSet<T> result(set.layout());
  for (auto& tok : out) result.insert(std::move(tok));
  return result;
}

// Runs one attention stage: every query token attends over the (t, i, f)
// candidates produced by `candidates(query)`. The output set has the query
// set's layout and indices.
template <typename T, typename CandidateFn>
BasicTokenSet<T> attend(const BasicTokenSet<T>& queries, const BasicTokenSet<T>& keys,
                        const BasicTokenSet<T>& values,
                        const BasicAttentionContext<T>& ctx,
                        CandidateFn&& candidates) {
  if (keys.layout() != values.layout()) {
    throw DimensionError("key and value sets have different layouts");
  }
  const BasicTokenSet<T>* q = &queries;
  const BasicTokenSet<T>* k = &keys;
  const BasicTokenSet<T>* v = &values;
  BasicTokenSet<T> pq, pk, pv;
  if (ctx.projections) {
    pq = project(queries, ctx.projections->query, ctx.threads);
    pk = project(keys, ctx.projections->key, ctx.threads);
    pv = project(values, ctx.projections->value, ctx.threads);
    q = &pq;
    k = &pk;
    v = &pv;
  }
  const T d_k = ctx.d_k > 0 ? ctx.d_k : static_cast<T>(queries.layout().token_dim());
  const auto qtokens = q->tokens();
  std::vector<BasicFrequencyToken<T>> out(qtokens.size());
  parallel_for(qtokens.size(), ctx.threads, [&](std::size_t n) {
    const auto& tok = qtokens[n];
    VectorList<T> kv, vv;
    for (const TokenIndex& c : candidates(tok)) {
      kv.push_back(k->vec(c.t, c.i, c.f));
      vv.push_back(v->vec(c.t, c.i, c.f));
    }
    const auto result = freq_attention(tok.vec(), kv, vv, d_k);
    BasicTensor<T> payload(tok.payload.shape(), result);
    out[n] = {tok.t, tok.i, tok.f, std::move(payload)};
  });
  BasicTokenSet<T> result(queries.layout());
  for (auto& tok : out) {
    tok.payload.require_finite("frequency attention");
    result.insert(std::move(tok));
  }
  return result;
}

inline void require_single_frame(const TokenLayout& l, const char* what) {
  if (l.frames != 1) {
    throw IntegrityError(std::string(what) + " must hold exactly one frame, got " +
                         std::to_string(l.frames));
  }
}

inline void require_same_grid(const TokenLayout& a, const TokenLayout& b,
                              const char* op) {
  if (!a.same_grid(b)) {
    throw DimensionError(std::string(op) + ": query and key/value token grids differ");
  }
}

}  // namespace detail

// Space-frequency attention. With `same_frequency_only` the query (i, f)
// sees only (i', f) tokens, which is the Base scheme's spatial stage.
template <typename T>
BasicTokenSet<T> sf_attention(const BasicTokenSet<T>& queries,
                              const BasicTokenSet<T>& keys,
                              const BasicTokenSet<T>& values,
                              const BasicAttentionContext<T>& ctx,
                              bool same_frequency_only = false) {
  detail::require_single_frame(queries.layout(), "space-frequency queries");
  detail::require_single_frame(keys.layout(), "space-frequency keys");
  if (queries.layout().frame_offset != keys.layout().frame_offset) {
    throw IntegrityError("space-frequency keys come from frame " +
                         std::to_string(keys.layout().frame_offset) +
                         " but queries from frame " +
                         std::to_string(queries.layout().frame_offset));
  }
  detail::require_same_grid(queries.layout(), keys.layout(), "sf_attention");
  const TokenLayout& l = keys.layout();
  const std::size_t t = l.frame_offset;
  return detail::attend(queries, keys, values, ctx, [&](const auto& q) {
    std::vector<detail::TokenIndex> c;
    for (std::size_t i = 0; i < l.blocks(); ++i) {
      if (same_frequency_only) {
        c.push_back({t, i, q.f});
      } else {
        for (std::size_t f = 0; f < l.frequencies; ++f) c.push_back({t, i, f});
      }
    }
    return c;
  });
}

template <typename T>
BasicTokenSet<T> base_attention(const BasicTokenSet<T>& queries,
                                const BasicTokenSet<T>& keys,
                                const BasicTokenSet<T>& values,
                                const BasicAttentionContext<T>& ctx) {
  return sf_attention(queries, keys, values, ctx, true);
}

// Time-frequency attention: query (t, i, f) attends to (t', i, f') for every
// frame t' of the temporal set at the same block i.
template <typename T>
BasicTokenSet<T> tf_attention(const BasicTokenSet<T>& queries,
                              const BasicTokenSet<T>& keys,
                              const BasicTokenSet<T>& values,
                              const BasicAttentionContext<T>& ctx,
                              bool same_frequency_only = false) {
  detail::require_same_grid(queries.layout(), keys.layout(), "tf_attention");
  const TokenLayout& l = keys.layout();
  if (l.frames == 0) throw DegenerateInputError("time-frequency attention without temporal keys");
  return detail::attend(queries, keys, values, ctx, [&](const auto& q) {
    std::vector<detail::TokenIndex> c;
    for (std::size_t t = l.frame_offset; t < l.frame_offset + l.frames; ++t) {
      if (same_frequency_only) {
        c.push_back({t, q.i, q.f});
      } else {
        for (std::size_t f = 0; f < l.frequencies; ++f) c.push_back({t, q.i, f});
      }
    }
    return c;
  });
}

// Joint time-space-frequency attention: a single softmax over every
// (t', i', f') of the temporal set.
template <typename T>
BasicTokenSet<T> joint_tsf_attention(const BasicTokenSet<T>& queries,
                                     const BasicTokenSet<T>& keys,
                                     const BasicTokenSet<T>& values,
                                     const BasicAttentionContext<T>& ctx) {
  detail::require_same_grid(queries.layout(), keys.layout(), "joint_tsf_attention");
  const TokenLayout& l = keys.layout();
  if (l.frames == 0) throw DegenerateInputError("joint attention over an empty temporal range");
  return detail::attend(queries, keys, values, ctx, [&](const auto&) {
    std::vector<detail::TokenIndex> c;
    c.reserve(l.count());
    for (std::size_t t = l.frame_offset; t < l.frame_offset + l.frames; ++t) {
      for (std::size_t i = 0; i < l.blocks(); ++i) {
        for (std::size_t f = 0; f < l.frequencies; ++f) c.push_back({t, i, f});
      }
    }
    return c;
  });
}

template <typename T>
BasicTokenSet<T> apply_ffn(const BasicTokenSet<T>& set, const BasicFfnWeights<T>& w,
                           int threads) {
  std::vector<BasicFrequencyToken<T>> out(set.size());
  const auto tokens = set.tokens();
  parallel_for(tokens.size(), threads, [&](std::size_t k) {
    const auto& tok = tokens[k];
    out[k] = {tok.t, tok.i, tok.f,
              BasicTensor<T>(tok.payload.shape(), ffn(tok.vec(), w))};
  });
  BasicTokenSet<T> result(set.layout());
  for (auto& tok : out) result.insert(std::move(tok));
  return result;
}

enum class StageOrder { kSpaceThenTime, kTimeThenSpace };

// Divided time-space-frequency attention. With no temporal frames the
// temporal stage is skipped and its input passes through unchanged. Each
// stage runs ctx.layers times, each followed by the FFN when ctx.ffn is set.
template <typename T>
BasicTokenSet<T> divided_tsf(const BasicTokenSet<T>& queries,
                             const BasicTokenSet<T>& spatial_keys,
                             const BasicTokenSet<T>& spatial_values,
                             const BasicTokenSet<T>& temporal_keys,
                             const BasicTokenSet<T>& temporal_values,
                             StageOrder order, const BasicAttentionContext<T>& ctx,
                             bool same_frequency_only = false) {
  auto stage = [&](BasicTokenSet<T> x, auto&& op) {
    for (std::size_t l = 0; l < std::max<std::size_t>(ctx.layers, 1); ++l) {
      x = op(x);
      if (ctx.ffn) x = apply_ffn(x, *ctx.ffn, ctx.threads);
    }
    return x;
  };
  auto spatial = [&](BasicTokenSet<T> x) {
    return stage(std::move(x), [&](const BasicTokenSet<T>& in) {
      return sf_attention(in, spatial_keys, spatial_values, ctx, same_frequency_only);
    });
  };
  auto temporal = [&](BasicTokenSet<T> x) {
    if (temporal_keys.layout().frames == 0) return x;
    return stage(std::move(x), [&](const BasicTokenSet<T>& in) {
      return tf_attention(in, temporal_keys, temporal_values, ctx, same_frequency_only);
    });
  };
  if (order == StageOrder::kSpaceThenTime) return temporal(spatial(queries));
  return spatial(temporal(queries));
}

// Runs `scheme` on a query/key/value bundle. Temporal stages are skipped
// (pass-through) when the bundle has no earlier frames.
template <typename T>
BasicTokenSet<T> apply_scheme(Scheme scheme, const BasicTokenSet<T>& queries,
                              const BasicTokenSet<T>& spatial_keys,
                              const BasicTokenSet<T>& spatial_values,
                              const BasicTokenSet<T>& temporal_keys,
                              const BasicTokenSet<T>& temporal_values,
                              const BasicAttentionContext<T>& ctx) {
  const bool has_past = temporal_keys.layout().frames > 0;
  auto repeat = [&](auto&& op) {
    BasicTokenSet<T> x = queries;
    for (std::size_t l = 0; l < std::max<std::size_t>(ctx.layers, 1); ++l) {
      x = op(x);
      if (ctx.ffn) x = apply_ffn(x, *ctx.ffn, ctx.threads);
    }
    return x;
  };
  switch (scheme) {
    case Scheme::kS:
      return repeat([&](const BasicTokenSet<T>& x) {
        return sf_attention(x, spatial_keys, spatial_values, ctx);
      });
    case Scheme::kT:
      if (!has_past) return queries;
      return repeat([&](const BasicTokenSet<T>& x) {
        return tf_attention(x, temporal_keys, temporal_values, ctx);
      });
    case Scheme::kTxS:
      if (!has_past) return queries;
      return repeat([&](const BasicTokenSet<T>& x) {
        return joint_tsf_attention(x, temporal_keys, temporal_values, ctx);
      });
    case Scheme::kST:
      return divided_tsf(queries, spatial_keys, spatial_values, temporal_keys,
                         temporal_values, StageOrder::kSpaceThenTime, ctx);
    case Scheme::kTS:
      return divided_tsf(queries, spatial_keys, spatial_values, temporal_keys,
                         temporal_values, StageOrder::kTimeThenSpace, ctx);
    case Scheme::kBase:
      return divided_tsf(queries, spatial_keys, spatial_values, temporal_keys,
                         temporal_values, StageOrder::kSpaceThenTime, ctx, true);
  }
  throw ParameterError("unknown attention scheme");
}

// Softmax weights of every spatial-stage query over the spatial keys, as a
// (queries x keys) tensor in token storage order. Intended for inspection
// dumps.
template <typename T>
BasicTensor<T> spatial_attention_map(const BasicTokenSet<T>& queries,
                                     const BasicTokenSet<T>& keys,
                                     const BasicAttentionContext<T>& ctx) {
  detail::require_same_grid(queries.layout(), keys.layout(), "spatial_attention_map");
  const auto qt = queries.tokens();
  const auto kt = keys.tokens();
  VectorList<T> kv;
  for (const auto& k : kt) kv.push_back(k.vec());
  const T d_k = ctx.d_k > 0 ? ctx.d_k : static_cast<T>(queries.layout().token_dim());
  BasicTensor<T> map({qt.size(), kt.size()});
  parallel_for(qt.size(), ctx.threads, [&](std::size_t n) {
    const auto w = attention_weights(qt[n].vec(), kv, d_k);
    std::copy(w.begin(), w.end(), map.data().begin() + n * kt.size());
  });
  return map;
}

}  // namespace fqt

#endif  // FQT_ATTENTION_HPP_
