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

#ifndef FQT_DUMPS_HPP_
#define FQT_DUMPS_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fqt/dct.hpp"
#include "fqt/error.hpp"
#include "fqt/tensor_io.hpp"
#include "fqt/tokenizer.hpp"

// Spectral maps and token sets are stored as FQT1 tensors with a plain-text
// sidecar next to them:
//   <file>.meta  "block_size=<B>" for spectral maps
//   <file>.idx   layout line, then one "t i f" line per stored token

namespace fqt {

inline std::filesystem::path sidecar(const std::filesystem::path& p, const char* ext) {
  return std::filesystem::path(p.string() + ext);
}

inline void save_spectral_map(const std::filesystem::path& path, const SpectralMap& map) {
  map.validate();
  save_tensor(path, map.data);
  std::ofstream meta(sidecar(path, ".meta"));
  meta << "block_size=" << map.block << '\n';
  if (!meta) throw FormatError("cannot write sidecar for " + path.string());
}

inline SpectralMap load_spectral_map(const std::filesystem::path& path) {
  std::ifstream meta(sidecar(path, ".meta"));
  std::string line;
  if (!meta || !std::getline(meta, line) || line.rfind("block_size=", 0) != 0) {
    throw FormatError("missing or malformed sidecar for " + path.string());
  }
  SpectralMap map{load_tensor(path), std::stoul(line.substr(11))};
  map.validate();
  return map;
}

// Payloads are stacked as (count x C x K x K) in storage order.
inline void save_token_set(const std::filesystem::path& path, const TokenSet& set) {
  const TokenLayout& l = set.layout();
  Tensor stacked({set.size(), l.channels, l.kernel, l.kernel});
  std::ofstream idx(sidecar(path, ".idx"));
  idx << "layout frame_offset=" << l.frame_offset << " frames=" << l.frames
      << " grid_rows=" << l.grid_rows << " grid_cols=" << l.grid_cols
      << " frequencies=" << l.frequencies << " channels=" << l.channels
      << " kernel=" << l.kernel << " block=" << l.block << '\n';
  const std::size_t dim = l.token_dim();
  std::size_t k = 0;
  for (const auto& tok : set.tokens()) {
    std::copy(tok.payload.data().begin(), tok.payload.data().end(),
              stacked.data().begin() + k * dim);
    idx << tok.t << ' ' << tok.i << ' ' << tok.f << '\n';
    ++k;
  }
  if (!idx) throw FormatError("cannot write index sidecar for " + path.string());
  save_tensor(path, stacked);
}

inline TokenSet load_token_set(const std::filesystem::path& path) {
  std::ifstream idx(sidecar(path, ".idx"));
  std::string line;
  if (!idx || !std::getline(idx, line) || line.rfind("layout ", 0) != 0) {
    throw FormatError("missing or malformed index sidecar for " + path.string());
  }
  TokenLayout l;
  std::istringstream fields(line.substr(7));
  std::string kv;
  while (fields >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError("bad layout field " + kv);
    const std::string key = kv.substr(0, eq);
    const std::size_t v = std::stoul(kv.substr(eq + 1));
    if (key == "frame_offset") l.frame_offset = v;
    else if (key == "frames") l.frames = v;
    else if (key == "grid_rows") l.grid_rows = v;
    else if (key == "grid_cols") l.grid_cols = v;
    else if (key == "frequencies") l.frequencies = v;
    else if (key == "channels") l.channels = v;
    else if (key == "kernel") l.kernel = v;
    else if (key == "block") l.block = v;
    else throw FormatError("unknown layout field " + key);
  }
  const Tensor stacked = load_tensor(path);
  const std::size_t dim = l.token_dim();
  TokenSet set(l);
  std::size_t t, i, f, k = 0;
  while (idx >> t >> i >> f) {
    if ((k + 1) * dim > stacked.size()) throw FormatError("index lists more tokens than stored");
    Tensor payload({l.channels, l.kernel, l.kernel});
    std::copy(stacked.data().begin() + k * dim, stacked.data().begin() + (k + 1) * dim,
              payload.data().begin());
    set.insert({t, i, f, std::move(payload)});
    ++k;
  }
  return set;
}

}  // namespace fqt

#endif  // FQT_DUMPS_HPP_
