/*
   Copyright 2026 The rmtratio Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "rmtratio/rng.hpp"

namespace rmtratio {
namespace {

// Reference vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const auto out = RngStream::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = RngStream::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                            {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = RngStream::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                            {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameSeedAndStreamReproduce) {
  RngStream a(11, 5), b(11, 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, StreamsAndSeedsDiffer) {
  RngStream a(11, 5), b(11, 6), c(12, 5);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RngStream, UniformIsOpenUnitInterval) {
  RngStream rng(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

struct Moments {
  double mean;
  double var;
};

template <typename Draw>
Moments moments(Draw draw, int n) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  return {m, s2 / n - m * m};
}

TEST(RngStream, NormalMoments) {
  RngStream rng(2, 0);
  const auto m = moments([&] { return rng.normal(); }, 400000);
  EXPECT_NEAR(m.mean, 0.0, 0.01);
  EXPECT_NEAR(m.var, 1.0, 0.01);
}

TEST(RngStream, ExponentialMoments) {
  RngStream rng(3, 0);
  const auto m = moments([&] { return rng.exponential(); }, 400000);
  EXPECT_NEAR(m.mean, 1.0, 0.01);
  EXPECT_NEAR(m.var, 1.0, 0.03);
}

class GammaShape : public ::testing::TestWithParam<double> {};

TEST_P(GammaShape, MeanAndVarianceEqualShape) {
  const double shape = GetParam();
  RngStream rng(4, static_cast<std::uint64_t>(shape * 100));
  const auto m = moments([&] { return rng.gamma(shape); }, 400000);
  EXPECT_NEAR(m.mean, shape, 0.01 * std::max(1.0, shape));
  EXPECT_NEAR(m.var, shape, 0.03 * std::max(1.0, shape));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaShape, ::testing::Values(0.3, 0.5, 1.0, 2.5, 7.0));

TEST(RngStream, ChiSquaredMean) {
  RngStream rng(5, 0);
  const auto m = moments([&] {
    const double c = rng.chi(3.0);
    return c * c;
  }, 400000);
  EXPECT_NEAR(m.mean, 3.0, 0.03);
}

}  // namespace
}  // namespace rmtratio
