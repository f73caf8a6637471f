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

#include <algorithm>
#include <cmath>
#include <vector>

#include "rmtratio/rmtratio.hpp"

namespace rmtratio {
namespace {

Spectrum spectrum_of(std::vector<double> ev) {
  Spectrum s;
  s.eigenvalues = std::move(ev);
  return s;
}

TEST(Spacings, Basic) {
  EXPECT_EQ(spacings(spectrum_of({0, 1, 3})), (std::vector<double>{1, 2}));
  EXPECT_EQ(spacings(spectrum_of({100, 101, 103})), (std::vector<double>{1, 2}));
  EXPECT_EQ(spacings(spectrum_of({0, 0, 1})), (std::vector<double>{0, 1}));
  EXPECT_THROW(spacings(spectrum_of({1.0})), Error);
}

TEST(Ratios, WorkedValues) {
  EXPECT_EQ(kth_order_ratios(spectrum_of({0, 1, 3, 7, 15}), 2).values, (std::vector<double>{4.0}));
  EXPECT_EQ(kth_order_ratios(spectrum_of({0, 1, 3}), 1).values, (std::vector<double>{2.0}));
  std::vector<double> ev(101);
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = static_cast<double>(i * i);
  EXPECT_EQ(kth_order_ratios(spectrum_of(ev), 3).size(), 95u);
}

TEST(Ratios, ZeroSpacingIsRejectedWithoutPartialOutput) {
  std::vector<double> out{42.0};
  try {
    append_kth_order_ratios(std::vector<double>{0, 1, 3, 3, 4}, 1, out);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSpacing);
  }
  EXPECT_EQ(out, (std::vector<double>{42.0}));
  EXPECT_THROW(kth_order_ratios(spectrum_of({0, 1, 3}), 0), Error);
}

TEST(Ratios, OrderOneIsQuotientOfSpacings) {
  RngStream rng(31, 0);
  const Spectrum s = sample_tridiagonal_beta({1.0, 40, MatrixModel::TridiagonalBeta, 0.5}, rng);
  const auto sp = spacings(s);
  const auto r = kth_order_ratios(s, 1).values;
  ASSERT_EQ(r.size(), sp.size() - 1);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], sp[i + 1] / sp[i]);
}

TEST(Ratios, ReciprocalClosure) {
  RngStream rng(32, 0);
  const Spectrum s = sample_tridiagonal_beta({2.0, 30, MatrixModel::TridiagonalBeta, 0.5}, rng);
  Spectrum mirrored = s;
  std::reverse(mirrored.eigenvalues.begin(), mirrored.eigenvalues.end());
  for (double& e : mirrored.eigenvalues) e = -e;
  for (std::size_t k : {1u, 2u, 5u}) {
    const auto fwd = kth_order_ratios(s, k).values;
    const auto rev = kth_order_ratios(mirrored, k).values;
    ASSERT_EQ(fwd.size(), rev.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      // Spacings are reproduced exactly, so r and 1/r differ by one division rounding.
      EXPECT_NEAR(rev[rev.size() - 1 - i] * fwd[i], 1.0, 5e-16) << "k=" << k;
    }
  }
}

TEST(Ratios, TranslationAndScaleInvariance) {
  // Dyadic levels and shifts keep every difference exact.
  std::vector<double> ev{0.125, 0.5, 1.75, 2.0, 3.375, 7.0, 7.5};
  const auto base = kth_order_ratios(spectrum_of(ev), 2).values;
  std::vector<double> moved = ev;
  for (double& e : moved) e = 4.0 * e + 1024.0;
  EXPECT_EQ(kth_order_ratios(spectrum_of(moved), 2).values, base);

  RngStream rng(33, 0);
  const Spectrum s = sample_tridiagonal_beta({1.0, 20, MatrixModel::TridiagonalBeta, 0.5}, rng);
  const auto r0 = kth_order_ratios(s, 2).values;
  Spectrum shifted = s;
  for (double& e : shifted.eigenvalues) e = 3.7 * e - 11.0;
  const auto r1 = kth_order_ratios(shifted, 2).values;
  for (std::size_t i = 0; i < r0.size(); ++i) EXPECT_NEAR(r1[i], r0[i], 1e-12 * r0[i]);
}

TEST(Ratios, PoolingOrderDoesNotChangeTheMultiset) {
  std::vector<Spectrum> spectra;
  for (std::uint64_t t = 0; t < 20; ++t) {
    RngStream rng(34, t);
    spectra.push_back(sample_tridiagonal_beta({1.0, 9, MatrixModel::TridiagonalBeta, 0.5}, rng));
  }
  std::vector<double> forward, backward;
  for (const auto& s : spectra) append_kth_order_ratios(s.eigenvalues, 2, forward);
  for (auto it = spectra.rbegin(); it != spectra.rend(); ++it) append_kth_order_ratios(it->eigenvalues, 2, backward);
  EXPECT_EQ(forward.size(), 20u * (9 - 4));
  std::sort(forward.begin(), forward.end());
  std::sort(backward.begin(), backward.end());
  EXPECT_EQ(forward, backward);
  for (double r : forward) EXPECT_TRUE(r > 0.0 && std::isfinite(r));
}

TEST(BulkFilter, TieRuleAndBoundaries) {
  std::vector<double> ev(10);
  for (std::size_t i = 0; i < 10; ++i) ev[i] = static_cast<double>(i + 1);
  EXPECT_EQ(bulk_filter(spectrum_of(ev), 0.5).eigenvalues, (std::vector<double>{4, 5, 6, 7, 8}));
  EXPECT_EQ(bulk_filter(spectrum_of(ev), 1.0).eigenvalues, ev);
  try {
    bulk_filter(spectrum_of({1, 2, 3, 4, 5}), 0.2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewLevels);
  }
  EXPECT_THROW(bulk_filter(spectrum_of(ev), 0.0), Error);
  EXPECT_THROW(bulk_filter(spectrum_of(ev), 1.5), Error);
  // 200 levels at one half keep the middle 100.
  std::vector<double> big(200);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  const auto kept = bulk_filter(spectrum_of(big), 0.5).eigenvalues;
  ASSERT_EQ(kept.size(), 100u);
  EXPECT_EQ(kept.front(), 50.0);
}

TEST(Histogram, CountsAndDensity) {
  RatioSeries s;
  s.values = {0.5, 1.5, 2.5};
  const Histogram h = histogram(s, {0, 1, 2, 3});
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1, 1}));
  EXPECT_EQ(h.total, 3u);
  EXPECT_DOUBLE_EQ(h.density(0), 1.0 / 3.0);

  s.values = {-1.0, 0.0, 3.0, 7.0};
  const Histogram edge = histogram(s, {0, 1, 2, 3});
  EXPECT_EQ(edge.counts, (std::vector<std::uint64_t>{1, 0, 1}));
  EXPECT_EQ(edge.underflow, 1u);
  EXPECT_EQ(edge.overflow, 1u);
  std::uint64_t in_range = 0;
  for (auto c : edge.counts) in_range += c;
  EXPECT_LE(in_range, edge.total);
}

TEST(Histogram, EmptySeriesAndBadEdges) {
  const Histogram h = histogram(RatioSeries{}, linear_edges(0, 1, 4));
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>(4, 0)));
  EXPECT_EQ(h.density(2), 0.0);
  EXPECT_THROW(histogram(RatioSeries{}, {0, 1, 1}), Error);
  EXPECT_THROW(histogram(RatioSeries{}, {1.0}), Error);
  EXPECT_THROW(log_edges(0.0, 1.0, 3), Error);
  const auto tail = default_tail_edges();
  EXPECT_EQ(tail.size(), 121u);
  EXPECT_DOUBLE_EQ(tail.front(), 1e-3);
  EXPECT_DOUBLE_EQ(tail.back(), 1e3);
  EXPECT_NEAR(tail[60], 1.0, 1e-12);
}

TEST(Ecdf, StepFunction) {
  RatioSeries s;
  s.values = {3.0, 1.0, 2.0, 2.0};
  const Ecdf f = ecdf(s);
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(1.0), 0.25);
  EXPECT_EQ(f(2.0), 0.75);
  EXPECT_EQ(f(2.5), 0.75);
  EXPECT_EQ(f(3.0), 1.0);
  EXPECT_EQ(ecdf(RatioSeries{}).size(), 0u);
}

TEST(Ecdf, SurmiseRatiosHaveUnitMedian) {
  const auto series =
      collect_ratios({{1.0, 3, MatrixModel::TridiagonalBeta, 0.5}, 1, 1000000, 1.0, 35, 1, 0}).series;
  EXPECT_NEAR(ecdf(series)(1.0), 0.5, 0.01);
}

}  // namespace
}  // namespace rmtratio
