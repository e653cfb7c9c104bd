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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fqt/config.hpp"
#include "fqt/dumps.hpp"
#include "fqt/image_io.hpp"
#include "fqt/random.hpp"
#include "fqt/tensor_io.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/weights.hpp"

namespace fqt {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("fqt_io_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(IoTest, TensorRoundtrip) {
  Rng rng(101);
  const Tensor t = random_normal<float>({2, 3, 5}, rng);
  save_tensor(dir_ / "t.fqt", t);
  EXPECT_EQ(load_tensor(dir_ / "t.fqt"), t);
  const Tensor scalar_like({1}, 4.25f);
  save_tensor(dir_ / "s.fqt", scalar_like);
  EXPECT_EQ(load_tensor(dir_ / "s.fqt"), scalar_like);
}

TEST_F(IoTest, TensorStreamLayout) {
  std::ostringstream os;
  write_tensor(os, Tensor({2}, {1.0f, -2.0f}));
  const std::string bytes = os.str();
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "FQT1");
  EXPECT_EQ(bytes[4], 1);  // rank, little-endian
  EXPECT_EQ(bytes[8], 2);  // extent
}

TEST_F(IoTest, TensorFormatErrors) {
  std::istringstream bad("NOPE");
  EXPECT_THROW(read_tensor(bad), FormatError);
  std::ostringstream os;
  write_tensor(os, Tensor({4}, 1.0f));
  std::istringstream truncated(os.str().substr(0, 14));
  EXPECT_THROW(read_tensor(truncated), FormatError);
  EXPECT_THROW(load_tensor(dir_ / "missing.fqt"), FormatError);
}

TEST_F(IoTest, SpectralMapRoundtrip) {
  Rng rng(102);
  const SpectralMap m{random_normal<float>({4, 3, 2, 6}, rng), 2};
  save_spectral_map(dir_ / "m.fqt", m);
  EXPECT_TRUE(fs::exists(sidecar(dir_ / "m.fqt", ".meta")));
  EXPECT_EQ(load_spectral_map(dir_ / "m.fqt"), m);
}

TEST_F(IoTest, TokenSetRoundtrip) {
  Rng rng(103);
  std::vector<SpectralMap> maps{{random_normal<float>({4, 2, 4, 4}, rng), 2},
                                {random_normal<float>({4, 2, 4, 4}, rng), 2}};
  const TokenSet s = tokenize(std::span<const SpectralMap>(maps), 2, 3);
  save_token_set(dir_ / "s.fqt", s);
  const TokenSet back = load_token_set(dir_ / "s.fqt");
  EXPECT_EQ(back.layout(), s.layout());
  EXPECT_EQ(detokenize(back), maps);
}

TEST_F(IoTest, WeightsRoundtrip) {
  const ModelWeights w = seeded_weights(WeightDims{3, 4, 2, 8, true}, 11);
  save_weights(dir_ / "w", w);
  const ModelWeights back = load_weights(dir_ / "w");
  EXPECT_EQ(back.upsampler.kernel, w.upsampler.kernel);
  EXPECT_EQ(back.attention.ffn.w1, w.attention.ffn.w1);
  EXPECT_EQ(back.attention.ffn.b2, w.attention.ffn.b2);
  EXPECT_EQ(back.attention.fusion, w.attention.fusion);
  ASSERT_TRUE(back.attention.projections.has_value());
  EXPECT_EQ(back.attention.projections->value, w.attention.projections->value);
  EXPECT_THROW(load_weights(dir_ / "nothing"), FormatError);
}

TEST(WeightsTest, SeededWeightsAreDeterministicAndShaped) {
  const WeightDims dims{3, 8, 8, 64, false};
  const ModelWeights a = seeded_weights(dims, 5), b = seeded_weights(dims, 5);
  EXPECT_EQ(a.attention.fusion, b.attention.fusion);
  EXPECT_NE(a.attention.fusion, seeded_weights(dims, 6).attention.fusion);
  EXPECT_EQ(a.attention.fusion.shape(), (Shape{192, 384}));
  EXPECT_EQ(a.attention.ffn.w1.shape(), (Shape{64, 192}));
  for (float v : a.attention.ffn.b1.data()) EXPECT_EQ(v, 0.0f);
  EXPECT_NO_THROW(check_weight_dims(a, dims));
  EXPECT_THROW(check_weight_dims(a, WeightDims{3, 4, 8, 64, false}), DimensionError);
}

TEST_F(IoTest, PpmRoundtripIsExactOn8BitValues) {
  Tensor f({3, 5, 7});
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<float>((k * 37) % 256) / 255.0f;
  write_frame(dir_ / "a.ppm", f);
  EXPECT_EQ(read_frame(dir_ / "a.ppm"), f);
  Tensor g({1, 3, 2}, 1.0f);
  write_frame(dir_ / "g.pgm", g);
  EXPECT_EQ(read_frame(dir_ / "g.pgm"), g);
}

TEST_F(IoTest, PpmClampsAndRejectsGarbage) {
  Tensor f({3, 1, 2});
  f(0, 0, 0) = -1.0f;
  f(0, 0, 1) = 2.0f;
  write_frame(dir_ / "c.ppm", f);
  const Tensor back = read_frame(dir_ / "c.ppm");
  EXPECT_EQ(back(0, 0, 0), 0.0f);
  EXPECT_EQ(back(0, 0, 1), 1.0f);
  std::ofstream(dir_ / "bad.ppm") << "P3\n1 1\n255\n0 0 0\n";
  EXPECT_THROW(read_frame(dir_ / "bad.ppm"), FormatError);
  EXPECT_THROW(read_frame(dir_ / "x.bmp"), FormatError);
  EXPECT_THROW(write_frame(dir_ / "two.ppm", Tensor({2, 1, 1})), DimensionError);
}

TEST_F(IoTest, PngRoundtrip) {
  if (!kHavePng) GTEST_SKIP() << "built without libpng";
  Tensor f({3, 4, 6});
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<float>((k * 11) % 256) / 255.0f;
  write_frame(dir_ / "a.png", f);
  EXPECT_EQ(read_frame(dir_ / "a.png"), f);
}

TEST_F(IoTest, ListFramesSortsAndFilters) {
  const Tensor f({3, 2, 2});
  write_frame(dir_ / frame_name(2), f);
  write_frame(dir_ / frame_name(1), f);
  std::ofstream(dir_ / "notes.txt") << "x";
  const auto files = list_frames(dir_);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "frame_0001.ppm");
  EXPECT_EQ(files[1].filename(), "frame_0002.ppm");
  EXPECT_THROW(list_frames(dir_ / "nope"), FormatError);
}

TEST(FrameNameTest, ZeroPadded) {
  EXPECT_EQ(frame_name(7), "frame_0007.ppm");
  EXPECT_EQ(frame_name(12345, ".png"), "frame_12345.png");
}

TEST(ConfigTest, ParsesCommentsAndWhitespace) {
  std::istringstream is("# header\n  scheme = TS \n\nB=4\nK = 2 # trailing\n");
  const KeyValues kv = parse_key_values(is);
  EXPECT_EQ(kv.at("scheme"), "TS");
  EXPECT_EQ(kv.at("B"), "4");
  EXPECT_EQ(kv.at("K"), "2");
  std::istringstream bad("scheme TS\n");
  EXPECT_THROW(parse_key_values(bad), ParameterError);
}

TEST(ConfigTest, ApplyAndRoundtrip) {
  RunConfig cfg;
  apply_key_values({{"scheme", "Base"}, {"seed", "99"}, {"bidirectional", "yes"},
                    {"tiles", "2"}, {"d_k", "12.5"}, {"projections", "1"}},
                   cfg);
  EXPECT_EQ(cfg.pipeline.scheme, Scheme::kBase);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_TRUE(cfg.pipeline.bidirectional);
  EXPECT_EQ(cfg.pipeline.tiles, 2u);
  EXPECT_FLOAT_EQ(cfg.pipeline.d_k, 12.5f);
  EXPECT_TRUE(cfg.projections);
  RunConfig again;
  apply_key_values(to_key_values(cfg), again);
  EXPECT_EQ(to_key_values(again), to_key_values(cfg));
}

TEST(ConfigTest, RejectsBadInput) {
  RunConfig cfg;
  EXPECT_THROW(apply_key_values({{"colour", "red"}}, cfg), ParameterError);
  EXPECT_THROW(apply_key_values({{"B", "-3"}}, cfg), ParameterError);
  EXPECT_THROW(apply_key_values({{"ffn", "maybe"}}, cfg), ParameterError);
  try {
    apply_key_values({{"scheme", "XS"}}, cfg);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("S, T, TxS, TS, ST, Base"), std::string::npos);
  }
}

}  // namespace
}  // namespace fqt
