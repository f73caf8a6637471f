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

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rmtratio/error.hpp"
#include "rmtratio/ratios.hpp"

namespace rmtratio {

enum class TailSide { SmallR, LargeR };

inline std::string_view to_string(TailSide side) {
  return side == TailSide::SmallR ? "small_r" : "large_r";
}

struct TailWindow {
  double lo = 0.02;
  double hi = 0.2;
  std::size_t min_count = 500;
};

/// Surmise-mode defaults: [0.02, 0.2] and its reciprocal image [5, 50].
inline constexpr TailWindow kDefaultSmallWindow{0.02, 0.2, 500};
inline constexpr TailWindow kDefaultLargeWindow{5.0, 50.0, 500};

/// How the log-density is regressed inside the window.
///  - PowerLaw: log P = c + p log r.
///  - AnalyticCorrection: log P = c + p log r + a z with z = r on the small-r
///    side and z = 1/r on the large-r side, i.e. P = r^p g(r) with g analytic
///    and non-zero at the limit. Windows that are not deep in the asymptotic
///    regime bias the pure power law (P(r, 4) itself gives ~3.4 on
///    [0.02, 0.2]); the extra term absorbs the first-order curvature.
enum class TailModel { PowerLaw, AnalyticCorrection };

inline std::string_view to_string(TailModel m) {
  return m == TailModel::PowerLaw ? "power_law" : "analytic_correction";
}

struct TailFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::size_t samples = 0;
  std::size_t bins_used = 0;
};

/// Log-log slope of the ratio density inside `window`.
///
/// The window is split into log-spaced bins (`bins_per_decade`); each
/// non-empty bin contributes the point (log of the geometric bin centre,
/// log of count / (total * width)) with weight equal to its count, the
/// inverse of the Poisson variance of log(count). The standard error is the
/// weighted least-squares one for known variances.
inline TailFit tail_exponent(const RatioSeries& series, TailSide side, const TailWindow& window,
                             TailModel model = TailModel::AnalyticCorrection, double bins_per_decade = 20.0) {
  require(window.lo > 0.0 && window.lo < window.hi, ErrorCode::InvalidArgument,
          "tail window needs 0 < lo < hi");
  if (side == TailSide::SmallR) {
    require(window.hi <= 1.0, ErrorCode::InvalidArgument, "small-r window must lie below r = 1");
  } else {
    require(window.lo >= 1.0, ErrorCode::InvalidArgument, "large-r window must lie above r = 1");
  }
  require(!series.empty(), ErrorCode::EmptySeries, "tail fit of an empty series");
  const double decades = std::log10(window.hi / window.lo);
  const auto bins = static_cast<std::size_t>(std::max(4.0, std::round(decades * bins_per_decade)));
  const Histogram h = histogram(series, log_edges(window.lo, window.hi, bins), Binning::LogOnR);

  std::size_t inside = 0;
  for (auto c : h.counts) inside += c;
  if (inside < window.min_count) {
    fail(ErrorCode::InsufficientTailSamples,
         std::string(to_string(side)) + " window holds " + std::to_string(inside) + " samples, need " +
             std::to_string(window.min_count) + " (enlarge trials or window)");
  }

  // Weighted normal equations on centred regressors (x = log r, z).
  struct Point {
    double w, x, z, y;
  };
  std::vector<Point> pts;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] == 0) continue;
    const double x = 0.5 * (std::log(h.edges[i]) + std::log(h.edges[i + 1]));
    const double z = side == TailSide::SmallR ? std::exp(x) : std::exp(-x);
    pts.push_back({static_cast<double>(h.counts[i]), x, z, std::log(h.density(i))});
  }
  const std::size_t params = model == TailModel::PowerLaw ? 2 : 3;
  if (pts.size() < params + 1) {
    fail(ErrorCode::InsufficientTailSamples, "too few occupied bins in the tail window");
  }
  double sw = 0.0, mx = 0.0, mz = 0.0, my = 0.0;
  for (const auto& p : pts) {
    sw += p.w;
    mx += p.w * p.x;
    mz += p.w * p.z;
    my += p.w * p.y;
  }
  mx /= sw;
  mz /= sw;
  my /= sw;
  double sxx = 0.0, sxz = 0.0, szz = 0.0, sxy = 0.0, szy = 0.0;
  for (const auto& p : pts) {
    const double dx = p.x - mx, dz = p.z - mz, dy = p.y - my;
    sxx += p.w * dx * dx;
    sxz += p.w * dx * dz;
    szz += p.w * dz * dz;
    sxy += p.w * dx * dy;
    szy += p.w * dz * dy;
  }
  if (model == TailModel::PowerLaw) return {sxy / sxx, 1.0 / std::sqrt(sxx), inside, pts.size()};
  const double det = sxx * szz - sxz * sxz;
  require(det > 0.0, ErrorCode::InsufficientTailSamples, "tail regressors are degenerate");
  const double slope = (szz * sxy - sxz * szy) / det;
  return {slope, std::sqrt(szz / det), inside, pts.size()};
}

}  // namespace rmtratio
