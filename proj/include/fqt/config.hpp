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

#ifndef FQT_CONFIG_HPP_
#define FQT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fqt/attention.hpp"
#include "fqt/error.hpp"
#include "fqt/pipeline.hpp"

namespace fqt {

// Plain "key = value" text; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline KeyValues parse_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + " has no '='");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot read config " + path.string());
  return parse_key_values(is);
}

// Settings of a forward run.
struct RunConfig {
  PipelineConfig pipeline;
  std::uint64_t seed = 0;
  std::size_t ffn_hidden = 64;
  bool projections = false;
};

namespace detail {

inline std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ParameterError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("'" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

inline std::string scheme_list() {
  std::string s;
  for (Scheme sc : kAllSchemes) {
    if (!s.empty()) s += ", ";
    s += scheme_name(sc);
  }
  return s;
}

// Applies recognised keys to `cfg`; unknown keys are an error.
inline void apply_key_values(const KeyValues& kv, RunConfig& cfg) {
  using detail::to_bool;
  using detail::to_size;
  auto& p = cfg.pipeline;
  for (const auto& [key, value] : kv) {
    if (key == "B") p.tokens.block = to_size(key, value);
    else if (key == "K") p.tokens.kernel = to_size(key, value);
    else if (key == "alpha") p.tokens.alpha = to_size(key, value);
    else if (key == "scheme") {
      const auto s = parse_scheme(value);
      if (!s) throw ParameterError("unknown scheme '" + value + "'; expected one of " + scheme_list());
      p.scheme = *s;
    } else if (key == "seed") cfg.seed = to_size(key, value);
    else if (key == "tiles") p.tiles = to_size(key, value);
    else if (key == "bidirectional") p.bidirectional = to_bool(key, value);
    else if (key == "threads") p.threads = static_cast<int>(to_size(key, value));
    else if (key == "layers") p.layers = to_size(key, value);
    else if (key == "history_depth") p.history_depth = to_size(key, value);
    else if (key == "ffn") p.use_ffn = to_bool(key, value);
    else if (key == "ffn_hidden") cfg.ffn_hidden = to_size(key, value);
    else if (key == "projections") cfg.projections = to_bool(key, value);
    else if (key == "channels") p.channels = to_size(key, value);
    else if (key == "d_k") {
      try {
        p.d_k = std::stof(value);
      } catch (const std::exception&) {
        throw ParameterError("'d_k' expects a number, got '" + value + "'");
      }
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
}

inline KeyValues to_key_values(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  return {{"B", std::to_string(p.tokens.block)},
          {"K", std::to_string(p.tokens.kernel)},
          {"alpha", std::to_string(p.tokens.alpha)},
          {"scheme", std::string(scheme_name(p.scheme))},
          {"seed", std::to_string(cfg.seed)},
          {"tiles", std::to_string(p.tiles)},
          {"bidirectional", p.bidirectional ? "true" : "false"},
          {"threads", std::to_string(p.threads)},
          {"layers", std::to_string(p.layers)},
          {"history_depth", std::to_string(p.history_depth)},
          {"ffn", p.use_ffn ? "true" : "false"},
          {"ffn_hidden", std::to_string(cfg.ffn_hidden)},
          {"projections", cfg.projections ? "true" : "false"},
          {"channels", std::to_string(p.channels)},
          {"d_k", std::to_string(p.d_k)}};
}

}  // namespace fqt

#endif  // FQT_CONFIG_HPP_
