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

// fqt: command-line front end.
//
// Exit codes: 0 success, 1 property failure, 2 usage or invalid input,
// 3 numeric failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "fqt/fqt.hpp"
#include "fqt/verify/acceptance.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProperty = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Raised for bad command-line input detected by the front end itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize k = 0; k < is.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Collects what every command records in its run manifest.
class Manifest {
 public:
  explicit Manifest(std::string command)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["config"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
  }

  void config(const std::string& key, json value) { doc_["config"][key] = std::move(value); }
  void seed(std::uint64_t s) { doc_["seed"] = s; }
  void input(const fs::path& p) { doc_["inputs"][p.filename().string()] = fnv1a(p); }
  void output(const fs::path& p) { doc_["outputs"][p.filename().string()] = fnv1a(p); }
  void result(const std::string& key, json value) { doc_["result"][key] = std::move(value); }

  void write(const fs::path& path) {
    doc_["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    os << doc_.dump(2) << '\n';
    if (!os) throw UsageError("cannot write manifest " + path.string());
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<fs::path> input_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("input directory " + dir.string() + " not found");
  auto frames = fqt::list_frames(dir);
  if (frames.empty()) throw UsageError("no frames (PPM/PNG) in " + dir.string());
  return frames;
}

std::string frame_extension(const std::string& format) {
  if (format == "ppm") return ".ppm";
  if (format == "png") {
    if (!fqt::kHavePng) throw UsageError("this build has no PNG support");
    return ".png";
  }
  throw UsageError("unknown frame format '" + format + "' (ppm or png)");
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("FQT_SEED");
  if (!s || !*s) return fallback;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(std::string("FQT_SEED is not an integer: ") + s);
  }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::size_t frames = 5, height = 128, width = 128;
  std::uint64_t seed = 7;
  std::string format = "ppm";
  fs::path out;
};

// Seeded moving texture: the synthetic_texture pattern drifting one pixel
// right per frame.
int cmd_synth(const SynthArgs& a) {
  Manifest m("synth");
  m.seed(a.seed);
  m.config("frames", a.frames);
  m.config("height", a.height);
  m.config("width", a.width);
  fs::create_directories(a.out);
  const std::size_t size = std::max(a.height, a.width) + a.frames;
  const fqt::Tensor base = fqt::acceptance::synthetic_texture(a.seed, size);
  const std::string ext = frame_extension(a.format);
  for (std::size_t t = 0; t < a.frames; ++t) {
    fqt::Tensor f({3, a.height, a.width});
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < a.height; ++y) {
        for (std::size_t x = 0; x < a.width; ++x) f(c, y, x) = base(c, y, x + a.frames - t);
      }
    }
    const fs::path p = a.out / fqt::frame_name(t + 1, ext);
    fqt::write_frame(p, f);
    m.output(p);
  }
  m.write(a.out / "run_manifest.json");
  return kExitOk;
}

struct DegradeArgs {
  std::size_t scale = 4;
  std::string q = "crf25-like";
  std::size_t block = 8;
  std::string format = "ppm";
  fs::path in, out;
};

int cmd_degrade(const DegradeArgs& a) {
  const auto q = fqt::parse_quality(a.q);
  if (!q) {
    throw UsageError("--q expects crf15-like, crf25-like, crf35-like or a number >= 0, got '" +
                     a.q + "'");
  }
  fqt::DegradeConfig cfg{a.scale, *q, a.block};
  cfg.validate();
  Manifest m("degrade");
  m.config("scale", a.scale);
  m.config("q", *q);
  m.config("q_label", a.q);
  m.config("block", a.block);
  std::vector<fqt::Tensor> hr;
  for (const auto& p : input_frames(a.in)) {
    hr.push_back(fqt::read_frame(p));
    m.input(p);
  }
  const auto lr = fqt::degrade_sequence(hr, cfg);
  fs::create_directories(a.out);
  const std::string ext = frame_extension(a.format);
  for (std::size_t t = 0; t < lr.size(); ++t) {
    const fs::path p = a.out / fqt::frame_name(t + 1, ext);
    fqt::write_frame(p, lr[t]);
    m.output(p);
  }
  m.write(a.out / "run_manifest.json");
  return kExitOk;
}

// Model options shared by forward and tokenize.
struct ModelArgs {
  fs::path config;
  fs::path weights;
  fs::path dump_weights;
  std::optional<std::string> scheme;
  std::optional<std::size_t> block, kernel, alpha, tiles, layers, history, ffn_hidden;
  std::optional<std::uint64_t> seed;
  std::optional<bool> bidirectional, projections;
  int threads = 1;

  fqt::RunConfig resolve() const {
    fqt::RunConfig rc;
    rc.seed = 7;
    if (!config.empty()) fqt::apply_key_values(fqt::load_key_values(config), rc);
    rc.seed = env_seed(rc.seed);
    auto& p = rc.pipeline;
    if (scheme) {
      const auto s = fqt::parse_scheme(*scheme);
      if (!s) {
        throw UsageError("unknown scheme '" + *scheme + "'; expected one of " +
                         fqt::scheme_list());
      }
      p.scheme = *s;
    }
    if (block) p.tokens.block = *block;
    if (kernel) p.tokens.kernel = *kernel;
    if (alpha) p.tokens.alpha = *alpha;
    if (tiles) p.tiles = *tiles;
    if (layers) p.layers = *layers;
    if (history) p.history_depth = *history;
    if (ffn_hidden) rc.ffn_hidden = *ffn_hidden;
    if (seed) rc.seed = *seed;
    if (bidirectional) p.bidirectional = *bidirectional;
    if (projections) rc.projections = *projections;
    p.threads = threads;
    p.validate();
    return rc;
  }

  fqt::ModelWeights load(const fqt::RunConfig& rc, Manifest& m) const {
    fqt::ModelWeights w;
    if (!weights.empty()) {
      w = fqt::load_weights(weights);
      for (const auto& e : fs::directory_iterator(weights)) {
        if (e.path().extension() == ".fqt") m.input(e.path());
      }
    } else {
      w = fqt::seeded_weights(rc.pipeline.weight_dims(rc.ffn_hidden, rc.projections), rc.seed);
    }
    if (!dump_weights.empty()) fqt::save_weights(dump_weights, w);
    return w;
  }

  void echo(const fqt::RunConfig& rc, Manifest& m) const {
    for (const auto& [k, v] : fqt::to_key_values(rc)) m.config(k, v);
    m.seed(rc.seed);
  }
};

void add_model_options(CLI::App* app, ModelArgs& a) {
  app->add_option("--config", a.config, "key=value config file")->check(CLI::ExistingFile);
  app->add_option("--weights", a.weights, "weight dump directory to load")
      ->check(CLI::ExistingDirectory);
  app->add_option("--dump-weights", a.dump_weights, "write the weights used to this directory");
  app->add_option("--scheme", a.scheme, "attention scheme: " + fqt::scheme_list());
  app->add_option("--B", a.block, "DCT block size");
  app->add_option("--K", a.kernel, "token kernel size");
  app->add_option("--alpha", a.alpha, "SR scale");
  app->add_option("--tiles", a.tiles, "g for g x g tiled inference");
  app->add_option("--layers", a.layers, "attention layers per stage");
  app->add_option("--history", a.history, "hidden states kept for temporal attention");
  app->add_option("--ffn-hidden", a.ffn_hidden, "FFN hidden width for seeded weights");
  app->add_option("--seed", a.seed, "weight seed (overrides config and FQT_SEED)");
  app->add_option("--bidirectional", a.bidirectional, "average a reversed pass (true/false)");
  app->add_option("--projections", a.projections, "use Q/K/V projections (true/false)");
  app->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
}

struct ForwardArgs {
  ModelArgs model;
  fs::path flows;
  fs::path dump_attention;
  std::string format = "ppm";
  fs::path in, out;
};

std::vector<fqt::FlowField> load_flows(const fs::path& dir, std::size_t frames, Manifest& m) {
  if (!fs::is_directory(dir)) throw UsageError("flow directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".fqt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() != frames) {
    throw UsageError("expected " + std::to_string(frames) + " flow files in " + dir.string() +
                     ", found " + std::to_string(files.size()));
  }
  std::vector<fqt::FlowField> flows;
  for (const auto& f : files) {
    flows.push_back({fqt::load_tensor(f)});
    m.input(f);
  }
  return flows;
}

int cmd_forward(const ForwardArgs& a) {
  Manifest m("forward");
  const fqt::RunConfig rc = a.model.resolve();
  a.model.echo(rc, m);
  const auto paths = input_frames(a.in);
  fqt::VideoSequence video;
  for (const auto& p : paths) {
    video.push_back(fqt::read_frame(p));
    m.input(p);
  }
  const fqt::ModelWeights w = a.model.load(rc, m);
  std::optional<std::vector<fqt::FlowField>> flows;
  if (!a.flows.empty()) flows = load_flows(a.flows, video.size(), m);
  const auto sr = fqt::run_sequence(video, flows ? &*flows : nullptr, w, rc.pipeline);

  fs::create_directories(a.out);
  const std::string ext = frame_extension(a.format);
  for (std::size_t t = 0; t < sr.size(); ++t) {
    const fs::path p = a.out / fqt::frame_name(t + 1, ext);
    fqt::write_frame(p, sr[t]);
    m.output(p);
  }
  if (!a.dump_attention.empty()) {
    fs::create_directories(a.dump_attention);
    const auto ctx = fqt::detail::attention_context(rc.pipeline, w);
    for (std::size_t t = 0; t < video.size(); ++t) {
      const auto padded = fqt::pad_edge(video[t], rc.pipeline.tokens.lr_divisor());
      const auto qkv = fqt::build_qkv(padded.frame, t, w, rc.pipeline.tokens);
      const fs::path p = a.dump_attention / ("attention_" + fqt::frame_name(t + 1, ".fqt"));
      fqt::save_tensor(p, fqt::spatial_attention_map(qkv.queries, qkv.spatial_keys, ctx));
      m.output(p);
    }
  }
  m.write(a.out / "run_manifest.json");
  return kExitOk;
}

struct TokenizeArgs {
  ModelArgs model;
  fs::path in, out;
};

// Writes, per frame, the query and key/value token sets and the spectral map
// of the upsampled frame.
int cmd_tokenize(const TokenizeArgs& a) {
  Manifest m("tokenize");
  const fqt::RunConfig rc = a.model.resolve();
  a.model.echo(rc, m);
  const fqt::ModelWeights w = a.model.load(rc, m);
  fs::create_directories(a.out);
  std::size_t t = 0;
  std::size_t tokens = 0;
  for (const auto& p : input_frames(a.in)) {
    m.input(p);
    const auto padded = fqt::pad_edge(fqt::read_frame(p), rc.pipeline.tokens.lr_divisor());
    const auto qkv = fqt::build_qkv(padded.frame, t, w, rc.pipeline.tokens);
    const std::string stem = p.stem().string();
    const fs::path q = a.out / (stem + "_query.fqt");
    const fs::path kv = a.out / (stem + "_keys.fqt");
    const fs::path d = a.out / (stem + "_spectral.fqt");
    fqt::save_token_set(q, qkv.queries);
    fqt::save_token_set(kv, qkv.spatial_keys);
    fqt::save_spectral_map(d, qkv.d_lr);
    for (const auto& o : {q, kv, d}) m.output(o);
    tokens += qkv.queries.size();
    ++t;
  }
  m.result("frames", t);
  m.result("query_tokens", tokens);
  m.write(a.out / "run_manifest.json");
  std::cout << "frames\t" << t << "\nquery_tokens\t" << tokens << '\n';
  return kExitOk;
}

struct RoundtripArgs {
  std::size_t block = 8;
  fs::path in;
  fs::path manifest = "run_manifest.json";
};

// DCT roundtrip and Parseval check on real frames.
int cmd_roundtrip(const RoundtripArgs& a) {
  Manifest m("roundtrip");
  m.config("block", a.block);
  double worst = 0.0, parseval = 0.0;
  for (const auto& p : input_frames(a.in)) {
    m.input(p);
    const fqt::Tensor f = fqt::read_frame(p);
    const auto padded = fqt::pad_edge(f, a.block);
    const auto map = fqt::frame_to_spectral(padded.frame, a.block);
    const fqt::Tensor back = fqt::unpad(fqt::spectral_to_frame(map), padded.record);
    const double err = fqt::max_abs_diff(back, f);
    const double e0 = fqt::sum_squares(padded.frame), e1 = fqt::sum_squares(map.data);
    const double rel = e0 > 0 ? std::abs(e1 - e0) / e0 : std::abs(e1);
    worst = std::max(worst, err);
    parseval = std::max(parseval, rel);
    std::cout << p.filename().string() << "\tmax_abs_error\t" << err << "\tparseval_rel\t" << rel
              << '\n';
  }
  const bool ok = worst < fqt::acceptance::kDctRoundtripTol &&
                  parseval < fqt::acceptance::kParsevalRelTol;
  m.result("max_abs_error", worst);
  m.result("parseval_rel", parseval);
  m.result("passed", ok);
  m.write(a.manifest);
  std::cout << (ok ? "PASS" : "FAIL") << " roundtrip\n";
  return ok ? kExitOk : kExitProperty;
}

struct GradcheckArgs {
  std::string target = "all";
  int precision = 64;
  int seeds = 20;
  fs::path manifest = "run_manifest.json";
};

template <typename T>
int run_gradcheck(const GradcheckArgs& a, double tol, double step, Manifest& m) {
  fqt::acceptance::detail::GradSuite<T> suite{tol, step, a.seeds};
  fqt::Rng rng(4004);
  bool all = true;
  auto report = [&](const char* name, double err) {
    const bool ok = err < tol;
    all = all && ok;
    m.result(name, err);
    std::cout << (ok ? "PASS" : "FAIL") << '\t' << name << "\tmax_rel_error\t" << err
              << "\ttol\t" << tol << '\n';
  };
  const std::string& t = a.target;
  if (t == "all" || t == "charbonnier") report("charbonnier", suite.charbonnier(rng));
  if (t == "all" || t == "ffn") report("ffn", suite.ffn_block(rng));
  if (t == "all" || t == "fusion") report("fusion", suite.fusion(rng));
  if (t == "all" || t == "attention") report("attention", suite.attention(rng));
  return all ? kExitOk : kExitProperty;
}

int cmd_gradcheck(const GradcheckArgs& a) {
  Manifest m("gradcheck");
  m.config("target", a.target);
  m.config("precision", a.precision);
  m.config("seeds", a.seeds);
  using namespace fqt::acceptance;
  const int code = a.precision == 64
                       ? run_gradcheck<double>(a, kGradTol64, kGradStep64, m)
                       : run_gradcheck<float>(a, kGradTol32, kGradStep32, m);
  m.write(a.manifest);
  return code;
}

struct MetricsArgs {
  fs::path sr, hr;
  fs::path manifest = "run_manifest.json";
};

int cmd_metrics(const MetricsArgs& a) {
  Manifest m("metrics");
  const auto sr = input_frames(a.sr), hr = input_frames(a.hr);
  if (sr.size() != hr.size()) {
    throw UsageError(std::to_string(sr.size()) + " SR frames but " + std::to_string(hr.size()) +
                     " reference frames");
  }
  std::cout << "frame\tpsnr_rgb\tpsnr_y\tssim_y\n";
  double sum_rgb = 0, sum_y = 0, sum_ssim = 0;
  json rows = json::array();
  for (std::size_t t = 0; t < sr.size(); ++t) {
    m.input(sr[t]);
    m.input(hr[t]);
    const fqt::Tensor a1 = fqt::read_frame(sr[t]), b1 = fqt::read_frame(hr[t]);
    const fqt::Tensor ya = fqt::luma(a1), yb = fqt::luma(b1);
    const double p = fqt::psnr(a1, b1), py = fqt::psnr(ya, yb), s = fqt::ssim(ya, yb);
    sum_rgb += p;
    sum_y += py;
    sum_ssim += s;
    std::cout << sr[t].filename().string() << '\t' << p << '\t' << py << '\t' << s << '\n';
    rows.push_back({{"frame", sr[t].filename().string()}, {"psnr_rgb", p}, {"psnr_y", py},
                    {"ssim_y", s}});
  }
  const double n = static_cast<double>(sr.size());
  std::cout << "mean\t" << sum_rgb / n << '\t' << sum_y / n << '\t' << sum_ssim / n << '\n';
  m.result("frames", rows);
  m.write(a.manifest);
  return kExitOk;
}

struct SpectrumArgs {
  std::size_t block = 8;
  std::size_t lo = 0;
  std::optional<std::size_t> hi;
  std::string mode = "amplitude";
  fs::path in;
  fs::path manifest = "run_manifest.json";
};

// Band-averaged spectrum over every frame of a directory (or one file).
int cmd_spectrum(const SpectrumArgs& a) {
  Manifest m("spectrum");
  fqt::SpectrumMode mode;
  if (a.mode == "amplitude") {
    mode = fqt::SpectrumMode::kAmplitude;
  } else if (a.mode == "energy") {
    mode = fqt::SpectrumMode::kEnergy;
  } else {
    throw UsageError("--mode expects amplitude or energy");
  }
  const std::size_t hi = a.hi.value_or(fqt::band_count(a.block) - 1);
  m.config("block", a.block);
  m.config("lo", a.lo);
  m.config("hi", hi);
  m.config("mode", a.mode);
  std::vector<fs::path> frames;
  if (fs::is_regular_file(a.in)) {
    frames.push_back(a.in);
  } else {
    frames = input_frames(a.in);
  }
  std::vector<fqt::SpectrumBand> total;
  for (const auto& p : frames) {
    m.input(p);
    const auto bands = fqt::amplitude_spectrum(fqt::read_frame(p), a.block, a.lo, hi, mode);
    if (total.empty()) {
      total = bands;
    } else {
      for (std::size_t k = 0; k < bands.size(); ++k) total[k].value += bands[k].value;
    }
  }
  std::cout << "band," << a.mode << '\n';
  for (auto& b : total) {
    b.value /= static_cast<double>(frames.size());
    std::cout << b.band << ',' << b.value << '\n';
  }
  m.write(a.manifest);
  return kExitOk;
}

struct SelftestArgs {
  int precision = 64;
  int threads = 4;
  std::string fault;
  bool verbose = false;
  fs::path manifest = "run_manifest.json";
};

int cmd_selftest(const SelftestArgs& a) {
  Manifest m("selftest");
  m.config("precision", a.precision);
  m.config("threads", a.threads);
  if (!a.fault.empty()) {
    if (a.fault != "dct-scale") throw UsageError("unknown fault '" + a.fault + "' (dct-scale)");
    fqt::testing_hooks::dct_ac_scale = 1.01;
    m.config("inject_fault", a.fault);
  }
  fqt::acceptance::Options opt;
  opt.wide = a.precision == 64;
  opt.threads = a.threads;
  bool ok = true;
  for (const auto& c : fqt::acceptance::run_all(opt)) {
    fqt::acceptance::print(std::cout, c, a.verbose);
    m.result("criterion_" + std::to_string(c.id), c.passed() ? "pass" : "fail: " + c.failing());
    ok = ok && c.passed();
  }
  std::cout << (ok ? "selftest passed" : "selftest FAILED") << '\n';
  m.write(a.manifest);
  return ok ? kExitOk : kExitProperty;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fqt: frequency-token video restoration toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a seeded synthetic frame sequence");
  s->add_option("--frames", synth.frames)->check(CLI::PositiveNumber);
  s->add_option("--height", synth.height)->check(CLI::PositiveNumber);
  s->add_option("--width", synth.width)->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed);
  s->add_option("--format", synth.format, "output frame format: ppm or png")->check(CLI::IsMember({"ppm", "png"}));
  s->add_option("out_dir", synth.out)->required();

  DegradeArgs degrade;
  auto* d = app.add_subcommand("degrade", "bicubic downscale plus DCT quantization");
  d->add_option("--scale", degrade.scale)->check(CLI::PositiveNumber);
  d->add_option("--q", degrade.q, "crf15-like, crf25-like, crf35-like or a number");
  d->add_option("--block", degrade.block)->check(CLI::PositiveNumber);
  d->add_option("--format", degrade.format, "output frame format: ppm or png")->check(CLI::IsMember({"ppm", "png"}));
  d->add_option("in_dir", degrade.in)->required();
  d->add_option("out_dir", degrade.out)->required();

  ForwardArgs forward;
  auto* f = app.add_subcommand("forward", "restore a frame sequence");
  add_model_options(f, forward.model);
  f->add_option("--flows", forward.flows, "directory of 2 x H x W flow tensors, one per frame");
  f->add_option("--dump-attention", forward.dump_attention,
                "write spatial attention maps to this directory");
  f->add_option("--format", forward.format, "output frame format: ppm or png")->check(CLI::IsMember({"ppm", "png"}));
  f->add_option("in_dir", forward.in)->required();
  f->add_option("out_dir", forward.out)->required();

  TokenizeArgs tokenize;
  auto* t = app.add_subcommand("tokenize", "dump query and key/value frequency tokens");
  add_model_options(t, tokenize.model);
  t->add_option("in_dir", tokenize.in)->required();
  t->add_option("out_dir", tokenize.out)->required();

  RoundtripArgs roundtrip;
  auto* r = app.add_subcommand("roundtrip", "DCT roundtrip and Parseval check on frames");
  r->add_option("--block", roundtrip.block)->check(CLI::PositiveNumber);
  r->add_option("--manifest", roundtrip.manifest);
  r->add_option("in_dir", roundtrip.in)->required();

  GradcheckArgs gradcheck;
  auto* g = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  g->add_option("--target", gradcheck.target)
      ->check(CLI::IsMember({"all", "charbonnier", "ffn", "fusion", "attention"}));
  g->add_option("--precision", gradcheck.precision)->check(CLI::IsMember({32, 64}));
  g->add_option("--seeds", gradcheck.seeds)->check(CLI::PositiveNumber);
  g->add_option("--manifest", gradcheck.manifest);

  MetricsArgs metrics;
  auto* mt = app.add_subcommand("metrics", "per-frame PSNR/SSIM of two frame directories");
  mt->add_option("--manifest", metrics.manifest);
  mt->add_option("sr_dir", metrics.sr)->required();
  mt->add_option("hr_dir", metrics.hr)->required();

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "band-averaged DCT spectrum as CSV");
  sp->add_option("--block", spectrum.block)->check(CLI::PositiveNumber);
  sp->add_option("--lo", spectrum.lo);
  sp->add_option("--hi", spectrum.hi);
  sp->add_option("--mode", spectrum.mode)->check(CLI::IsMember({"amplitude", "energy"}));
  sp->add_option("--manifest", spectrum.manifest);
  sp->add_option("input", spectrum.in, "frame file or directory")->required();

  SelftestArgs selftest;
  auto* st = app.add_subcommand("selftest", "run acceptance criteria 1-7");
  st->add_option("--precision", selftest.precision, "64 (tolerance 1e-5) or 32")
      ->check(CLI::IsMember({32, 64}));
  st->add_option("--threads", selftest.threads)->check(CLI::PositiveNumber);
  st->add_option("--inject-fault", selftest.fault, "dct-scale perturbs the DCT normalization");
  st->add_flag("--verbose", selftest.verbose);
  st->add_option("--manifest", selftest.manifest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*d) return cmd_degrade(degrade);
    if (*f) return cmd_forward(forward);
    if (*t) return cmd_tokenize(tokenize);
    if (*r) return cmd_roundtrip(roundtrip);
    if (*g) return cmd_gradcheck(gradcheck);
    if (*mt) return cmd_metrics(metrics);
    if (*sp) return cmd_spectrum(spectrum);
    if (*st) return cmd_selftest(selftest);
  } catch (const fqt::NumericError& e) {
    std::cerr << "fqt: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "fqt: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
