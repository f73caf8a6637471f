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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmtratio/ensembles.hpp"
#include "rmtratio/error.hpp"

namespace rmtratio {

struct RatioSource {
  std::string ensemble;  // e.g. "tridiagonal beta=1 n=5"
  double bulk_fraction = 1.0;
  std::size_t trials = 0;
};

/// Pooled k-th order spacing ratios. Values are positive and finite.
struct RatioSeries {
  std::size_t k = 1;
  std::vector<double> values;
  RatioSource source;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// s_i = E_{i+1} - E_i.
inline std::vector<double> spacings(const Spectrum& spectrum) {
  const auto& e = spectrum.eigenvalues;
  require(e.size() >= 2, ErrorCode::InsufficientLevels, "spacings need at least 2 levels");
  std::vector<double> s(e.size() - 1);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) s[i] = e[i + 1] - e[i];
  return s;
}

/// Appends the non-overlapping order-k ratios
/// (E_{i+2k} - E_{i+k}) / (E_{i+k} - E_i) of `levels` to `out`.
/// Nothing is appended if any ratio would be zero, infinite or NaN.
inline void append_kth_order_ratios(std::span<const double> levels, std::size_t k,
                                    std::vector<double>& out) {
  require(k >= 1, ErrorCode::InvalidArgument, "ratio order k must be >= 1");
  const std::size_t n = levels.size();
  require(n >= 2 * k + 1, ErrorCode::InsufficientLevels,
          "order-" + std::to_string(k) + " ratios need at least " + std::to_string(2 * k + 1) +
              " levels, got " + std::to_string(n));
  const std::size_t count = n - 2 * k;
  const std::size_t start = out.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double lower = levels[i + k] - levels[i];
    const double upper = levels[i + 2 * k] - levels[i + k];
    const double r = upper / lower;
    if (!(lower > 0.0) || !(upper > 0.0) || !std::isfinite(r)) {
      out.resize(start);
      fail(ErrorCode::DegenerateSpacing, "zero spacing at level " + std::to_string(i));
    }
    out.push_back(r);
  }
}

inline RatioSeries kth_order_ratios(const Spectrum& spectrum, std::size_t k) {
  RatioSeries series;
  series.k = k;
  append_kth_order_ratios(spectrum.eigenvalues, k, series.values);
  series.source.trials = 1;
  return series;
}

/// Keeps the central ceil(fraction * n) levels. When the trimmed count is odd
/// the extra level comes off the bottom (10 levels at 0.5 keep levels 4..8).
inline Spectrum bulk_filter(const Spectrum& spectrum, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::InvalidArgument,
          "bulk fraction must lie in (0, 1]");
  const std::size_t n = spectrum.size();
  const auto keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) * (1.0 - 1e-12)));
  require(keep >= 2, ErrorCode::TooFewLevels,
          "bulk filter leaves " + std::to_string(keep) + " level(s), need >= 2");
  const std::size_t trimmed = n - keep;
  const std::size_t bottom = (trimmed + 1) / 2;
  Spectrum out;
  out.spec = spectrum.spec;
  out.seed_tag = spectrum.seed_tag;
  out.eigenvalues.assign(spectrum.eigenvalues.begin() + static_cast<std::ptrdiff_t>(bottom),
                         spectrum.eigenvalues.begin() + static_cast<std::ptrdiff_t>(bottom + keep));
  return out;
}

enum class Binning { LinearOnR, LogOnR };

struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  Binning binning = Binning::LinearOnR;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  /// count / (total * width); zero when the series was empty.
  double density(std::size_t i) const {
    if (total == 0) return 0.0;
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
  }
};

inline std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
  require(bins >= 1 && lo < hi, ErrorCode::BadEdges, "linear edges need lo < hi and bins >= 1");
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  e.back() = hi;
  return e;
}

inline std::vector<double> log_edges(double lo, double hi, std::size_t bins) {
  require(bins >= 1 && lo > 0.0 && lo < hi, ErrorCode::BadEdges,
          "log edges need 0 < lo < hi and bins >= 1");
  std::vector<double> e(bins + 1);
  const double step = std::log(hi / lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo * std::exp(step * static_cast<double>(i));
  e.front() = lo;
  e.back() = hi;
  return e;
}

/// Default binning for tail work: 120 log bins over [1e-3, 1e3].
inline std::vector<double> default_tail_edges() { return log_edges(1e-3, 1e3, 120); }

/// Bins are half-open [e_i, e_{i+1}) except the last, which includes its
/// upper edge. Values outside the edges go to underflow/overflow.
inline Histogram histogram(const RatioSeries& series, std::vector<double> edges,
                           Binning binning = Binning::LinearOnR) {
  require(edges.size() >= 2, ErrorCode::BadEdges, "histogram needs at least two edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    require(edges[i] < edges[i + 1], ErrorCode::BadEdges, "histogram edges must be strictly increasing");
  }
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  h.edges = std::move(edges);
  h.binning = binning;
  h.total = series.values.size();
  for (double v : series.values) {
    if (v < h.edges.front()) {
      ++h.underflow;
    } else if (v > h.edges.back()) {
      ++h.overflow;
    } else {
      auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
      auto bin = static_cast<std::size_t>(it - h.edges.begin()) - 1;
      if (bin == h.counts.size()) --bin;
      ++h.counts[bin];
    }
  }
  return h;
}

/// Right-continuous empirical CDF.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    if (sorted_.empty()) return 0.0;
    const auto below = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(below) / static_cast<double>(sorted_.size());
  }

  std::span<const double> steps() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

inline Ecdf ecdf(const RatioSeries& series) { return Ecdf(series.values); }

}  // namespace rmtratio
