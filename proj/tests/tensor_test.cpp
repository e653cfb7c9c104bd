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


#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fqt/parallel.hpp"
#include "fqt/random.hpp"
#include "fqt/tensor.hpp"

namespace fqt {
namespace {

TEST(TensorTest, VolumeMatchesData) {
  Tensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(shape_volume(t.shape()), t.size());
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(shape_string(t.shape()), "[2x3x4]");
}

TEST(TensorTest, MismatchedDataIsDimensionError) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<float>{1, 2, 3}), DimensionError);
}

TEST(TensorTest, RowMajorIndexing) {
  Tensor t({2, 3}, std::vector<float>{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(t(1, 2), 5.0f);
  EXPECT_EQ(t(0, 1), 1.0f);
  EXPECT_THROW(t(1), DimensionError);
}

TEST(TensorTest, ReshapeKeepsData) {
  Tensor t({2, 3}, std::vector<float>{0, 1, 2, 3, 4, 5});
  const Tensor r = t.reshaped({3, 2});
  EXPECT_EQ(r(2, 1), 5.0f);
  EXPECT_THROW(t.reshaped({4, 2}), DimensionError);
}

TEST(TensorTest, NonFiniteIsReported) {
  Tensor t({2});
  EXPECT_NO_THROW(t.require_finite("test"));
  t[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(t.require_finite("test"), NumericError);
  t[1] = std::numeric_limits<float>::infinity();
  EXPECT_FALSE(t.all_finite());
}

TEST(TensorTest, Arithmetic) {
  Tensor a({2}, std::vector<float>{1, 2});
  Tensor b({2}, std::vector<float>{3, 5});
  EXPECT_EQ((a + b), Tensor({2}, std::vector<float>{4, 7}));
  EXPECT_EQ((b - a), Tensor({2}, std::vector<float>{2, 3}));
  EXPECT_EQ((a * 2.0f), Tensor({2}, std::vector<float>{2, 4}));
  EXPECT_THROW(a += Tensor({3}), DimensionError);
  EXPECT_FLOAT_EQ(max_abs_diff(a, b), 3.0f);
  EXPECT_DOUBLE_EQ(sum_squares(a), 5.0);
}

TEST(RngTest, SeededStreamsRepeat) {
  Rng a(42), b(42), c(43);
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(Rng(42).next(), c.next());
}

TEST(RngTest, NormalHasUnitMoments) {
  Rng rng(5);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 0.03);
  EXPECT_NEAR(s2 / n, 1.0, 0.05);
}

TEST(ParallelTest, EveryIndexVisitedOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelTest, ExceptionsPropagate) {
  EXPECT_THROW(parallel_for(10, 4,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace fqt
