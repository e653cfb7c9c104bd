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

#ifndef FQT_VERIFY_ACCEPTANCE_HPP_
#define FQT_VERIFY_ACCEPTANCE_HPP_

// Acceptance criteria 1-7 as named property checks. Shared by the
// acceptance binary and the `selftest` command.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fqt/attention.hpp"
#include "fqt/compressor.hpp"
#include "fqt/dct.hpp"
#include "fqt/gradcheck.hpp"
#include "fqt/metrics.hpp"
#include "fqt/pipeline.hpp"
#include "fqt/random.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/verify/oracles.hpp"
#include "fqt/weights.hpp"

namespace fqt::acceptance {

// Pinned tolerances and budgets.
inline constexpr double kDctRoundtripTol = 1e-5;
inline constexpr double kDctOracleTol = 1e-5;
inline constexpr double kParsevalRelTol = 1e-5;
inline constexpr double kOrthonormalityTol = 1e-12;
inline constexpr double kDctBudgetSeconds = 5.0;
inline constexpr double kAttentionOracleTol = 1e-5;
inline constexpr double kInvarianceTol = 1e-6;
inline constexpr double kGradTol64 = 1e-5;
inline constexpr double kGradStep64 = 1e-5;
inline constexpr double kGradTol32 = 1e-2;
inline constexpr double kGradStep32 = 1e-2;
inline constexpr double kTiledInteriorTol = 1e-4;
inline constexpr double kDegradeBudgetSeconds = 10.0;
inline constexpr double kPsnrTol = 1e-3;
inline constexpr double kSsimIdentityTol = 1e-12;
inline constexpr double kSsimSymmetryTol = 1e-7;
inline constexpr double kSelftestBudgetSeconds = 120.0;

struct Check {
  std::string property;
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  std::string failing() const {
    std::string s;
    for (const auto& c : checks) {
      if (c.passed) continue;
      if (!s.empty()) s += ", ";
      s += c.property;
    }
    return s;
  }
};

struct Options {
  bool wide = true;  // 64-bit gradient checks
  int threads = 4;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline Check bound(std::string property, double value, double limit, const char* what) {
  return {std::move(property), value < limit,
          std::string(what) + " " + fmt(value) + " (limit " + fmt(limit) + ")"};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Runs `body`, converting a library exception into a failed check.
template <typename Fn>
void guarded(Criterion& c, const std::string& property, Fn&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.checks.push_back({property, false, std::string("threw: ") + e.what()});
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. DCT fidelity

inline Criterion dct_fidelity(const Options& = {}) {
  Criterion c{1, "DCT fidelity", {}, 0.0};
  detail::Stopwatch sw;
  detail::guarded(c, "orthonormality", [&] {
    double worst = 0.0;
    for (std::size_t b : {4, 8}) {
      const DctBasis basis(b);
      for (std::size_t u = 0; u < b; ++u) {
        for (std::size_t w = 0; w < b; ++w) {
          double g = 0.0;
          for (std::size_t x = 0; x < b; ++x) g += basis(u, x) * basis(w, x);
          worst = std::max(worst, std::abs(g - (u == w ? 1.0 : 0.0)));
        }
      }
    }
    c.checks.push_back(detail::bound("orthonormality", worst, kOrthonormalityTol,
                                     "max |C C^T - I|"));
  });
  detail::guarded(c, "spectral roundtrip", [&] {
    Rng rng(1001);
    double roundtrip = 0.0, oracle = 0.0, parseval = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Tensor frame = random_uniform<float>({3, 64, 64}, rng);
      const SpectralMap map = frame_to_spectral(frame, 8);
      roundtrip = std::max<double>(roundtrip, max_abs_diff(spectral_to_frame(map), frame));
      const Tensor64 ref = oracle::spectral_direct(frame.cast<double>(), 8);
      oracle = std::max(oracle, max_abs_diff(map.data.cast<double>(), ref));
      const double e0 = sum_squares(frame), e1 = sum_squares(map.data);
      parseval = std::max(parseval, std::abs(e1 - e0) / e0);
    }
    c.checks.push_back(detail::bound("spectral roundtrip", roundtrip, kDctRoundtripTol,
                                     "max abs error"));
    c.checks.push_back(detail::bound("separable vs direct DCT", oracle, kDctOracleTol,
                                     "max abs difference"));
    c.checks.push_back(detail::bound("Parseval", parseval, kParsevalRelTol,
                                     "max relative energy change"));
  });
  c.seconds = sw.seconds();
  c.checks.push_back(detail::bound("runtime", c.seconds, kDctBudgetSeconds, "seconds"));
  return c;
}

// ---------------------------------------------------------------------------
// 2. Tokenization exactness

inline Criterion tokenization_exactness(const Options& = {}) {
  Criterion c{2, "Tokenization exactness", {}, 0.0};
  detail::Stopwatch sw;
  detail::guarded(c, "token count and roundtrip", [&] {
    Rng rng(2002);
    int count_ok = 0, roundtrip_ok = 0, order_ok = 0;
    for (int n = 0; n < 20; ++n) {
      const std::size_t frames = 1 + rng.index(4);
      const std::size_t rows = 1 + rng.index(4), cols = 1 + rng.index(4);
      const std::size_t b = rng.index(2) ? 8 : 4, k = rng.index(2) ? 8 : 4;
      const std::size_t ch = rng.index(2) ? 3 : 1;
      std::vector<SpectralMap> maps;
      for (std::size_t t = 0; t < frames; ++t) {
        maps.push_back({random_normal<float>({b * b, ch, rows * k, cols * k}, rng), b});
      }
      const std::size_t offset = rng.index(3);
      const TokenSet set = tokenize(std::span<const SpectralMap>(maps), k, offset);
      count_ok += set.size() == frames * rows * cols * b * b;
      roundtrip_ok += detokenize(set) == maps;
      // Reinsertion in reverse order must not matter.
      TokenSet reversed(set.layout());
      for (auto it = set.tokens().rbegin(); it != set.tokens().rend(); ++it) reversed.insert(*it);
      order_ok += detokenize(reversed) == maps;
    }
    c.checks.push_back({"token count T*N*F", count_ok == 20,
                        std::to_string(count_ok) + "/20 configs"});
    c.checks.push_back({"bit-identical roundtrip", roundtrip_ok == 20 && order_ok == 20,
                        std::to_string(roundtrip_ok) + "/20 configs, " +
                            std::to_string(order_ok) + "/20 reordered"});
  });
  detail::guarded(c, "golden 64x64 shape", [&] {
    Rng rng(2003);
    const Tensor lr = random_uniform<float>({3, 64, 64}, rng);
    const ModelWeights w = seeded_weights(WeightDims{}, 7);
    const QkvBundle b = build_qkv(lr, 0, w, TokenizerConfig{4, 8, 8});
    const TokenLayout& l = b.queries.layout();
    const auto& tok = b.queries.tokens().front();
    const bool ok = l.blocks() == 16 && l.frequencies == 64 &&
                    tok.payload.shape() == Shape{3, 8, 8} && b.queries.size() == 1024 &&
                    b.spatial_keys.size() == 1024;
    c.checks.push_back({"golden 64x64 shape", ok,
                        "N=" + std::to_string(l.blocks()) + " F=" +
                            std::to_string(l.frequencies) + " payload " +
                            shape_string(tok.payload.shape()) + " |Q|=" +
                            std::to_string(b.queries.size())});
  });
  c.seconds = sw.seconds();
  return c;
}

// ---------------------------------------------------------------------------
// 3. Attention oracle equivalence

namespace detail {

struct AttentionInstance {
  std::size_t kernel = 1;
  SpectralMap query, spatial;
  std::vector<SpectralMap> past;  // frames 0 .. T-2; query is frame T-1
  std::optional<FfnWeights> ffn;
  std::optional<BasicProjections<float>> projections;
  float d_k = 0;
  std::size_t layers = 1;
};

}  // namespace detail

inline detail::AttentionInstance random_attention_instance(Rng& rng) {
  detail::AttentionInstance a;
  const std::size_t b = rng.index(3) ? 2 : 1;  // F = 4 or 1
  const std::size_t ch = 1 + rng.index(3);
  a.kernel = 1 + rng.index(2);
  const std::size_t blocks = 1 + rng.index(4);
  const std::size_t rows = blocks == 4 && rng.index(2) ? 2 : 1;
  const std::size_t cols = blocks / rows;
  const std::size_t frames = 1 + rng.index(3);
  const Shape shape{b * b, ch, rows * a.kernel, cols * a.kernel};
  a.query = {random_uniform<float>(shape, rng, -1, 1), b};
  a.spatial = {random_uniform<float>(shape, rng, -1, 1), b};
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    a.past.push_back({random_uniform<float>(shape, rng, -1, 1), b});
  }
  const std::size_t dim = ch * a.kernel * a.kernel;
  if (rng.index(2)) {
    const std::size_t hidden = 2 + rng.index(6);
    const double s = 0.5 / std::sqrt(static_cast<double>(dim));
    a.ffn = FfnWeights{random_normal<float>({hidden, dim}, rng, s),
                       random_normal<float>({hidden}, rng, 0.1),
                       random_normal<float>({dim, hidden}, rng, s),
                       random_normal<float>({dim}, rng, 0.1)};
  }
  if (rng.index(3) == 0) {
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    a.projections = BasicProjections<float>{random_normal<float>({dim, dim}, rng, s),
                                            random_normal<float>({dim, dim}, rng, s),
                                            random_normal<float>({dim, dim}, rng, s)};
  }
  if (rng.index(2)) a.d_k = static_cast<float>(rng.uniform(0.5, 4.0));
  a.layers = 1 + rng.index(2);
  return a;
}

// Production output map of `scheme` on an instance.
inline Tensor run_scheme(Scheme scheme, const detail::AttentionInstance& a, int threads) {
  const std::size_t target = a.past.size();
  const TokenSet q = tokenize(a.query, a.kernel, target);
  const TokenSet s = tokenize(a.spatial, a.kernel, target);
  TokenSet past;
  if (a.past.empty()) {
    TokenLayout l = q.layout();
    l.frames = 0;
    l.frame_offset = 0;
    past = TokenSet(l);
  } else {
    past = tokenize(std::span<const SpectralMap>(a.past), a.kernel, 0);
  }
  AttentionContext ctx;
  ctx.d_k = a.d_k;
  ctx.layers = a.layers;
  ctx.threads = threads;
  ctx.ffn = a.ffn ? &*a.ffn : nullptr;
  ctx.projections = a.projections ? &*a.projections : nullptr;
  return detokenize(apply_scheme(scheme, q, s, s, past, past, ctx)).front().data;
}

inline Tensor64 oracle_scheme(Scheme scheme, const detail::AttentionInstance& a) {
  oracle::AttentionSetup s;
  s.kernel = a.kernel;
  s.d_k = a.d_k;
  s.layers = a.layers;
  if (a.ffn) {
    s.ffn = oracle::Ffn{a.ffn->w1.cast<double>(), a.ffn->b1.cast<double>(),
                        a.ffn->w2.cast<double>(), a.ffn->b2.cast<double>()};
  }
  if (a.projections) {
    s.projections = oracle::Projections{a.projections->query.cast<double>(),
                                        a.projections->key.cast<double>(),
                                        a.projections->value.cast<double>()};
  }
  std::vector<Tensor64> past;
  for (const auto& p : a.past) past.push_back(p.data.cast<double>());
  return oracle::scheme(scheme, a.query.data.cast<double>(), a.spatial.data.cast<double>(),
                        past, s);
}

inline Criterion attention_equivalence(const Options& opt = {}) {
  Criterion c{3, "Attention oracle equivalence", {}, 0.0};
  detail::Stopwatch sw;
  detail::guarded(c, "scheme oracles", [&] {
    Rng rng(3003);
    std::vector<double> worst(kAllSchemes.size(), 0.0);
    for (int n = 0; n < 50; ++n) {
      const auto inst = random_attention_instance(rng);
      for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
        const Tensor got = run_scheme(kAllSchemes[s], inst, opt.threads);
        const Tensor64 want = oracle_scheme(kAllSchemes[s], inst);
        worst[s] = std::max(worst[s], max_abs_diff(got.cast<double>(), want));
      }
    }
    for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
      c.checks.push_back(detail::bound(std::string(scheme_name(kAllSchemes[s])) + " vs oracle",
                                       worst[s], kAttentionOracleTol, "max abs difference"));
    }
  });
  detail::guarded(c, "key/value permutation invariance", [&] {
    Rng rng(3004);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
      const std::size_t dim = 1 + rng.index(12), count = 1 + rng.index(16);
      const Tensor q = random_uniform<float>({dim}, rng, -1, 1);
      const Tensor k = random_uniform<float>({count, dim}, rng, -1, 1);
      const Tensor v = random_uniform<float>({count, dim}, rng, -1, 1);
      std::vector<std::size_t> perm(count);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t j = count; j > 1; --j) std::swap(perm[j - 1], perm[rng.index(j)]);
      VectorList<float> ks, vs, kp, vp;
      for (std::size_t j = 0; j < count; ++j) {
        ks.push_back(k.data().subspan(j * dim, dim));
        vs.push_back(v.data().subspan(j * dim, dim));
        kp.push_back(k.data().subspan(perm[j] * dim, dim));
        vp.push_back(v.data().subspan(perm[j] * dim, dim));
      }
      const auto a = freq_attention<float>(q.data(), ks, vs, static_cast<float>(dim));
      const auto b = freq_attention<float>(q.data(), kp, vp, static_cast<float>(dim));
      for (std::size_t d = 0; d < dim; ++d) {
        worst = std::max(worst, static_cast<double>(std::abs(a[d] - b[d])));
      }
    }
    c.checks.push_back(detail::bound("key/value permutation invariance", worst,
                                     kInvarianceTol, "max abs difference"));
  });
  detail::guarded(c, "logit shift invariance", [&] {
    Rng rng(3005);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
      // Every key has the same component a along e0, so moving q along e0
      // shifts all logits by the same amount.
      const std::size_t dim = 2 + rng.index(11), count = 1 + rng.index(16);
      const float a = static_cast<float>(rng.uniform(-1, 1));
      const float shift = static_cast<float>(rng.uniform(-2, 2));
      Tensor q = random_uniform<float>({dim}, rng, -1, 1);
      Tensor k = random_uniform<float>({count, dim}, rng, -1, 1);
      for (std::size_t j = 0; j < count; ++j) k(j, 0) = a;
      VectorList<float> ks;
      for (std::size_t j = 0; j < count; ++j) ks.push_back(k.data().subspan(j * dim, dim));
      const auto w0 = attention_weights<float>(q.data(), ks, static_cast<float>(dim));
      q(0) += shift;
      const auto w1 = attention_weights<float>(q.data(), ks, static_cast<float>(dim));
      for (std::size_t j = 0; j < count; ++j) {
        worst = std::max(worst, static_cast<double>(std::abs(w0[j] - w1[j])));
      }
      Tensor v = random_uniform<float>({count}, rng, -3, 3);
      const auto s0 = softmax(std::span<const float>(v.data()));
      for (auto& x : v.data()) x += shift;
      const auto s1 = softmax(std::span<const float>(v.data()));
      for (std::size_t j = 0; j < count; ++j) {
        worst = std::max(worst, static_cast<double>(std::abs(s0[j] - s1[j])));
      }
    }
    c.checks.push_back(detail::bound("logit shift invariance", worst, kInvarianceTol,
                                     "max weight change"));
  });
  c.seconds = sw.seconds();
  return c;
}

// ---------------------------------------------------------------------------
// 4. Gradient checks

namespace detail {

// Directional probe: compares g.dir with the central difference of
// s -> value(x + s dir) at s = 0.
template <typename T>
double probe(const std::function<T(std::span<const T>)>& value, std::span<const T> grad,
             const std::vector<T>& x, Rng& rng, double tol, double step) {
  std::vector<T> dir(x.size());
  for (auto& d : dir) d = static_cast<T>(rng.normal());
  T analytic = 0;
  for (std::size_t k = 0; k < x.size(); ++k) analytic += grad[k] * dir[k];
  const std::function<T(std::span<const T>)> line = [&](std::span<const T> s) {
    std::vector<T> p(x);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += s[0] * dir[k];
    return value(p);
  };
  const std::vector<T> a{analytic};
  return gradcheck<T>(line, a, std::vector<T>{T{0}}, tol, step).max_rel_error;
}

template <typename T>
std::vector<T> flat(std::initializer_list<const BasicTensor<T>*> parts) {
  std::vector<T> v;
  for (const auto* p : parts) v.insert(v.end(), p->data().begin(), p->data().end());
  return v;
}

template <typename T>
void unflat(std::span<const T> v, std::initializer_list<BasicTensor<T>*> parts) {
  std::size_t k = 0;
  for (auto* p : parts) {
    std::copy(v.begin() + k, v.begin() + k + p->size(), p->data().begin());
    k += p->size();
  }
}

template <typename T>
struct GradSuite {
  double tol, step;
  int seeds = 20;
  int probes = 3;

  double charbonnier(Rng& rng) const {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const std::size_t frames = 1 + rng.index(3);
      std::vector<BasicTensor<T>> sr, hr;
      for (std::size_t t = 0; t < frames; ++t) {
        sr.push_back(random_uniform<T>({3, 4, 4}, rng));
        hr.push_back(random_uniform<T>({3, 4, 4}, rng));
      }
      const auto g = charbonnier_grad<T>(sr, hr);
      std::vector<T> x, gx;
      for (std::size_t t = 0; t < frames; ++t) {
        x.insert(x.end(), sr[t].data().begin(), sr[t].data().end());
        gx.insert(gx.end(), g[t].data().begin(), g[t].data().end());
      }
      const std::function<T(std::span<const T>)> f = [&](std::span<const T> p) {
        std::vector<BasicTensor<T>> probe_sr = sr;
        std::size_t k = 0;
        for (auto& fr : probe_sr) {
          for (auto& v : fr.data()) v = p[k++];
        }
        return static_cast<T>(charbonnier_loss<T>(probe_sr, hr).total);
      };
      for (int n = 0; n < probes; ++n) {
        worst = std::max(worst, probe<T>(f, gx, x, rng, tol, step));
      }
    }
    return worst;
  }

  double ffn_block(Rng& rng) const {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const std::size_t dim = 2 + rng.index(10), hidden = 2 + rng.index(10);
      BasicFfnWeights<T> w{random_normal<T>({hidden, dim}, rng, 0.7),
                           random_normal<T>({hidden}, rng, 0.3),
                           random_normal<T>({dim, hidden}, rng, 0.7),
                           random_normal<T>({dim}, rng, 0.3)};
      const BasicTensor<T> x = random_normal<T>({dim}, rng);
      const BasicTensor<T> probe_out = random_normal<T>({dim}, rng);
      const auto g = ffn_backward<T>(x.data(), w, probe_out.data());
      auto objective = [&](std::span<const T> in, const BasicFfnWeights<T>& ww) {
        const auto y = ffn<T>(in, ww);
        return dot<T>(std::span<const T>(y), probe_out.data());
      };
      // Input and all four weight tensors in one flat vector.
      const auto point = flat<T>({&x, &w.w1, &w.b1, &w.w2, &w.b2});
      BasicTensor<T> gin({dim}, g.input);
      const auto grad = flat<T>({&gin, &g.weights.w1, &g.weights.b1, &g.weights.w2,
                                 &g.weights.b2});
      const std::function<T(std::span<const T>)> f = [&](std::span<const T> p) {
        BasicTensor<T> xi({dim});
        BasicFfnWeights<T> wi = BasicFfnWeights<T>::zeros(dim, hidden);
        unflat<T>(p, {&xi, &wi.w1, &wi.b1, &wi.w2, &wi.b2});
        return objective(xi.data(), wi);
      };
      for (int n = 0; n < probes; ++n) {
        worst = std::max(worst, probe<T>(f, grad, point, rng, tol, step));
      }
    }
    return worst;
  }

  double fusion(Rng& rng) const {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const std::size_t b = 1 + rng.index(2), ch = 1 + rng.index(2);
      const std::size_t gh = 1 + rng.index(3), gw = 1 + rng.index(3);
      const std::size_t width = b * b * ch;
      BasicSpectralMap<T> a{random_normal<T>({b * b, ch, gh, gw}, rng), b};
      BasicSpectralMap<T> c2{random_normal<T>({b * b, ch, gh, gw}, rng), b};
      BasicTensor<T> m = random_normal<T>({width, 2 * width}, rng, 0.5);
      BasicSpectralMap<T> probe_out{random_normal<T>({b * b, ch, gh, gw}, rng), b};
      const auto g = fuse_backward<T>(a, c2, m, probe_out);
      const auto point = flat<T>({&a.data, &c2.data, &m});
      const auto grad = flat<T>({&g.first.data, &g.second.data, &g.reduction});
      const std::function<T(std::span<const T>)> f = [&](std::span<const T> p) {
        BasicSpectralMap<T> ai{BasicTensor<T>(a.data.shape()), b};
        BasicSpectralMap<T> bi{BasicTensor<T>(a.data.shape()), b};
        BasicTensor<T> mi(m.shape());
        unflat<T>(p, {&ai.data, &bi.data, &mi});
        const auto y = fuse<T>(ai, bi, mi);
        return dot<T>(y.data.data(), probe_out.data.data());
      };
      for (int n = 0; n < probes; ++n) {
        worst = std::max(worst, probe<T>(f, grad, point, rng, tol, step));
      }
    }
    return worst;
  }

  double attention(Rng& rng) const {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const std::size_t dim = 1 + rng.index(8), count = 1 + rng.index(8);
      const T d_k = static_cast<T>(rng.uniform(0.5, 8.0));
      BasicTensor<T> q = random_normal<T>({dim}, rng);
      BasicTensor<T> k = random_normal<T>({count, dim}, rng);
      BasicTensor<T> v = random_normal<T>({count, dim}, rng);
      const BasicTensor<T> probe_out = random_normal<T>({dim}, rng);
      auto lists = [&](const BasicTensor<T>& kk, const BasicTensor<T>& vv) {
        std::pair<VectorList<T>, VectorList<T>> l;
        for (std::size_t j = 0; j < count; ++j) {
          l.first.push_back(kk.data().subspan(j * dim, dim));
          l.second.push_back(vv.data().subspan(j * dim, dim));
        }
        return l;
      };
      const auto [ks, vs] = lists(k, v);
      const auto g = freq_attention_backward<T>(q.data(), ks, vs, d_k, probe_out.data());
      BasicTensor<T> gq({dim}, g.query), gk({count, dim}), gv({count, dim});
      for (std::size_t j = 0; j < count; ++j) {
        std::copy(g.keys[j].begin(), g.keys[j].end(), gk.data().begin() + j * dim);
        std::copy(g.values[j].begin(), g.values[j].end(), gv.data().begin() + j * dim);
      }
      const auto point = flat<T>({&q, &k, &v});
      const auto grad = flat<T>({&gq, &gk, &gv});
      const std::function<T(std::span<const T>)> f = [&](std::span<const T> p) {
        BasicTensor<T> qi({dim}), ki({count, dim}), vi({count, dim});
        unflat<T>(p, {&qi, &ki, &vi});
        const auto [kl, vl] = lists(ki, vi);
        const auto y = freq_attention<T>(qi.data(), kl, vl, d_k);
        return dot<T>(std::span<const T>(y), probe_out.data());
      };
      for (int n = 0; n < probes; ++n) {
        worst = std::max(worst, probe<T>(f, grad, point, rng, tol, step));
      }
    }
    return worst;
  }
};

template <typename T>
void gradient_checks(Criterion& c, double tol, double step) {
  const GradSuite<T> suite{tol, step};
  Rng rng(4004);
  guarded(c, "Charbonnier gradient", [&] {
    c.checks.push_back(bound("Charbonnier gradient", suite.charbonnier(rng), tol,
                             "max relative error"));
  });
  guarded(c, "FFN gradient", [&] {
    c.checks.push_back(bound("FFN gradient", suite.ffn_block(rng), tol, "max relative error"));
  });
  guarded(c, "fusion gradient", [&] {
    c.checks.push_back(bound("fusion gradient", suite.fusion(rng), tol, "max relative error"));
  });
  guarded(c, "attention Jacobian-vector products", [&] {
    c.checks.push_back(bound("attention Jacobian-vector products", suite.attention(rng), tol,
                             "max relative error"));
  });
}

}  // namespace detail

inline Criterion gradient_checks(const Options& opt = {}) {
  Criterion c{4, "Gradient checks", {}, 0.0};
  detail::Stopwatch sw;
  if (opt.wide) {
    detail::gradient_checks<double>(c, kGradTol64, kGradStep64);
  } else {
    detail::gradient_checks<float>(c, kGradTol32, kGradStep32);
  }
  detail::guarded(c, "Charbonnier identity", [&] {
    Rng rng(4005);
    const Tensor64 a = random_uniform<double>({3, 8, 8}, rng);
    const std::vector<Tensor64> sr{a, a}, hr{a, a};
    const double loss = charbonnier_loss<double>(sr, hr).total;
    c.checks.push_back({"Charbonnier identity", loss == kCharbonnierEps,
                        "loss " + detail::fmt(loss) + " (expected exactly 1e-3)"});
  });
  c.seconds = sw.seconds();
  return c;
}

// ---------------------------------------------------------------------------
// 5. Pipeline contracts

inline Criterion pipeline_contracts(const Options& opt = {}) {
  Criterion c{5, "Pipeline contracts", {}, 0.0};
  detail::Stopwatch sw;
  PipelineConfig cfg;
  cfg.scheme = Scheme::kST;
  const ModelWeights w = seeded_weights(cfg.weight_dims(64, false), 7);
  Rng rng(5005);
  VideoSequence video;
  for (int t = 0; t < 5; ++t) video.push_back(random_uniform<float>({3, 32, 32}, rng));

  VideoSequence single;
  detail::guarded(c, "shape contract", [&] {
    single = run_sequence(video, nullptr, w, cfg);
    const bool ok = single.size() == 5 &&
                    std::all_of(single.begin(), single.end(), [](const Tensor& f) {
                      return f.shape() == Shape{3, 128, 128};
                    });
    c.checks.push_back({"shape contract", ok,
                        std::to_string(single.size()) + " frames of " +
                            (single.empty() ? "?" : shape_string(single.front().shape()))});
  });
  detail::guarded(c, "thread determinism", [&] {
    PipelineConfig many = cfg;
    many.threads = std::max(opt.threads, 4);
    const VideoSequence multi = run_sequence(video, nullptr, w, many);
    c.checks.push_back({"thread determinism", multi == single,
                        "threads 1 vs " + std::to_string(many.threads)});
  });
  detail::guarded(c, "causality", [&] {
    VideoSequence edited = video;
    edited[3] = random_uniform<float>({3, 32, 32}, rng);
    const VideoSequence out = run_sequence(edited, nullptr, w, cfg);
    const bool ok = std::equal(out.begin(), out.begin() + 3, single.begin()) &&
                    !(out[3] == single[3]);
    c.checks.push_back({"causality", ok, "frames 1-3 after editing frame 4"});
  });
  detail::guarded(c, "tiled interior agreement", [&] {
    const Tensor frame = random_uniform<float>({3, 64, 64}, rng);
    const Tensor whole = tiled_inference(frame, w, cfg, 1);
    const Tensor tiled = tiled_inference(frame, w, cfg, 2);
    // HR seams at 128 on both axes; keep pixels at least B*K from them.
    const std::size_t seam = 128, margin = cfg.tokens.block * cfg.tokens.kernel;
    auto interior = [&](std::size_t p) { return p + margin <= seam || p >= seam + margin; };
    double worst = 0.0;
    for (std::size_t ch = 0; ch < 3; ++ch) {
      for (std::size_t y = 0; y < 256; ++y) {
        for (std::size_t x = 0; x < 256; ++x) {
          if (!interior(y) || !interior(x)) continue;
          worst = std::max(worst, static_cast<double>(std::abs(whole(ch, y, x) - tiled(ch, y, x))));
        }
      }
    }
    c.checks.push_back(detail::bound("tiled interior agreement", worst, kTiledInteriorTol,
                                     "max abs difference"));
  });
  c.seconds = sw.seconds();
  return c;
}

// ---------------------------------------------------------------------------
// 6. Degradation monotonicity

// Seeded texture: a few random oriented sinusoids plus fine noise.
inline Tensor synthetic_texture(std::uint64_t seed, std::size_t size = 64) {
  Rng rng(seed);
  Tensor t({3, size, size});
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < 6; ++k) {
    waves.push_back({rng.uniform(0.02, 0.45), rng.uniform(0.02, 0.45),
                     rng.uniform(0, 2 * std::numbers::pi), rng.uniform(0.03, 0.1)});
  }
  for (std::size_t ch = 0; ch < 3; ++ch) {
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        double v = 0.5;
        for (const auto& w : waves) {
          v += w.amp * std::sin(2 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase + ch);
        }
        v += rng.uniform(-0.08, 0.08);
        t(ch, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return t;
}

inline Criterion degradation_monotonicity(const Options& = {}) {
  Criterion c{6, "Degradation monotonicity", {}, 0.0};
  detail::Stopwatch sw;
  detail::guarded(c, "PSNR decreases", [&] {
    constexpr std::size_t kBlock = 8;
    int psnr_ok = 0, band_ok = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Tensor tex = synthetic_texture(6000 + seed);
      std::vector<double> p, h;
      for (const auto& preset : kQualityPresets) {
        const Tensor out = quantize_compress(tex, preset.q, kBlock);
        p.push_back(psnr(tex, out));
        h.push_back(high_band_amplitude(out, kBlock, kBlock));
      }
      psnr_ok += p[0] > p[1] && p[1] > p[2];
      band_ok += h[0] > h[1] && h[1] > h[2];
      if (seed == 1) {
        detail = "seed 1 PSNR " + detail::fmt(p[0]) + " > " + detail::fmt(p[1]) + " > " +
                 detail::fmt(p[2]) + ", high band " + detail::fmt(h[0]) + " > " +
                 detail::fmt(h[1]) + " > " + detail::fmt(h[2]);
      }
    }
    c.checks.push_back({"PSNR decreases", psnr_ok == 5,
                        std::to_string(psnr_ok) + "/5 textures; " + detail});
    c.checks.push_back({"high-band amplitude decreases", band_ok == 5,
                        std::to_string(band_ok) + "/5 textures"});
  });
  c.seconds = sw.seconds();
  c.checks.push_back(detail::bound("runtime", c.seconds, kDegradeBudgetSeconds, "seconds"));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Metric sanity

inline Criterion metric_sanity(const Options& = {}) {
  Criterion c{7, "Metric sanity", {}, 0.0};
  detail::Stopwatch sw;
  detail::guarded(c, "PSNR closed form", [&] {
    // Uniform error of 16 levels on a 255 scale.
    Rng rng(7007);
    Tensor a = random_uniform<float>({3, 16, 16}, rng, 0.2, 0.7);
    Tensor b = a;
    for (auto& v : b.data()) v += 16.0f / 255.0f;
    const Tensor64 a64 = a.cast<double>();
    Tensor64 b64 = a64;
    for (auto& v : b64.data()) v += 16.0 / 255.0;
    const double want = 20.0 * std::log10(255.0 / 16.0);
    const double got = psnr(a64, b64);
    const double got32 = psnr(a, b);
    const double err = std::max(std::abs(got - want), std::abs(got32 - want));
    c.checks.push_back({"PSNR closed form", err < kPsnrTol,
                        "psnr " + std::to_string(got) + " dB vs 20 log10(255/16) = " +
                            std::to_string(want) + " dB"});
    const Tensor64 r = random_uniform<double>({3, 16, 16}, rng);
    const double diff = std::abs(psnr(a64, r) - oracle::psnr(a64, r, 1.0));
    c.checks.push_back(detail::bound("PSNR vs oracle", diff, kPsnrTol, "dB difference"));
  });
  detail::guarded(c, "SSIM identity", [&] {
    Rng rng(7008);
    double identity = 0.0, symmetry = 0.0;
    for (int n = 0; n < 5; ++n) {
      const Tensor a = random_uniform<float>({3, 32, 32}, rng);
      Tensor b = a;
      for (auto& v : b.data()) v = std::clamp(v + static_cast<float>(rng.uniform(-0.2, 0.2)), 0.f, 1.f);
      const Tensor ya = luma(a), yb = luma(b);
      identity = std::max(identity, std::abs(ssim(ya, ya) - 1.0));
      symmetry = std::max(symmetry, std::abs(ssim(ya, yb) - ssim(yb, ya)));
    }
    c.checks.push_back(detail::bound("SSIM identity", identity, kSsimIdentityTol, "|ssim(a,a) - 1|"));
    c.checks.push_back(detail::bound("SSIM symmetry", symmetry, kSsimSymmetryTol,
                                     "|ssim(a,b) - ssim(b,a)|"));
  });
  c.seconds = sw.seconds();
  return c;
}

// ---------------------------------------------------------------------------

inline std::vector<Criterion> run_all(const Options& opt = {}) {
  using Fn = Criterion (*)(const Options&);
  const Fn all[] = {dct_fidelity,      tokenization_exactness,   attention_equivalence,
                    gradient_checks,   pipeline_contracts,       degradation_monotonicity,
                    metric_sanity};
  std::vector<Criterion> out;
  for (Fn fn : all) out.push_back(fn(opt));
  return out;
}

// "PASS criterion 1: DCT fidelity (0.41 s)" plus indented failing checks.
inline void print(std::ostream& os, const Criterion& c, bool verbose = false) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", c.seconds);
  os << (c.passed() ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " ("
     << secs << " s)";
  if (!c.passed()) os << " failing: " << c.failing();
  os << '\n';
  for (const auto& ch : c.checks) {
    if (verbose || !ch.passed) {
      os << "    " << (ch.passed ? "ok   " : "FAIL ") << ch.property << ": " << ch.detail << '\n';
    }
  }
}

}  // namespace fqt::acceptance

#endif  // FQT_VERIFY_ACCEPTANCE_HPP_
