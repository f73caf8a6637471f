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
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "rmtratio/error.hpp"
#include "rmtratio/quadrature.hpp"

namespace rmtratio {

/// Effective Dyson index of the order-k ratio: k(k+1)/2 * beta + (k - 1).
inline double beta_prime(std::size_t k, double beta) {
  require(k >= 1, ErrorCode::InvalidArgument, "ratio order k must be >= 1");
  require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be >= 0");
  const auto kd = static_cast<double>(k);
  return kd * (kd + 1.0) / 2.0 * beta + (kd - 1.0);
}

namespace detail {

// log(1 + r + r^2) without cancellation or overflow.
inline double log_one_r_r2(double r) {
  if (r <= 1.0) return std::log1p(r * (1.0 + r));
  const double inv = 1.0 / r;
  return 2.0 * std::log(r) + std::log1p(inv * (1.0 + inv));
}

// Surmise density in the compact variable t = r / (1 + r), up to Z:
// [t(1-t)]^b / (1 - t + t^2)^(1 + 3b/2). It peaks at t = 1/2.
inline double log_surmise_density_t(double t, double bp) {
  const double u = t * (1.0 - t);
  return bp * std::log(u) - (1.0 + 1.5 * bp) * std::log1p(-u);
}

inline double compute_log_z(double bp) {
  const double log_peak = log_surmise_density_t(0.5, bp);
  auto scaled = [bp, log_peak](double t) {
    if (t <= 0.0 || t >= 1.0) return bp == 0.0 ? 1.0 / std::exp(log_peak) : 0.0;
    return std::exp(log_surmise_density_t(t, bp) - log_peak);
  };
  const QuadratureResult q = integrate(scaled, 0.0, 1.0, {1e-12, 4000});
  return log_peak + std::log(q.value);
}

class LogZCache {
 public:
  double get(double bp) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = values_.find(bp); it != values_.end()) return it->second;
    }
    const double value = compute_log_z(bp);
    std::unique_lock lock(mutex_);
    values_[bp] = value;
    return value;
  }

 private:
  std::shared_mutex mutex_;
  std::map<double, double> values_;
};

inline LogZCache& log_z_cache() {
  static LogZCache cache;
  return cache;
}

}  // namespace detail

/// log Z for the generalized surmise at effective index bp >= 0.
inline double log_normalization_constant(double bp, bool use_cache = true) {
  require(bp >= 0.0 && std::isfinite(bp), ErrorCode::InvalidArgument, "beta' must be >= 0");
  return use_cache ? detail::log_z_cache().get(bp) : detail::compute_log_z(bp);
}

/// Z such that (1/Z) (r + r^2)^bp / (1 + r + r^2)^(1 + 3bp/2) integrates to
/// one over (0, inf). Computed by adaptive quadrature in t = r / (1 + r) and
/// cached per bp.
inline double normalization_constant(double bp) { return std::exp(log_normalization_constant(bp)); }

/// Generalized Wigner-like surmise for the nearest-neighbour ratio with a
/// real effective index.
struct SurmiseModel {
  double beta_prime = 1.0;
  double z_norm = 1.0;
  double norm_tolerance = 1e-10;
  double log_z = 0.0;

  static SurmiseModel make(double bp) {
    SurmiseModel m;
    m.beta_prime = bp;
    m.log_z = log_normalization_constant(bp);
    m.z_norm = std::exp(m.log_z);
    return m;
  }
};

inline double surmise_logpdf(double r, const SurmiseModel& model) {
  require(r > 0.0, ErrorCode::DomainError, "surmise density needs r > 0");
  const double bp = model.beta_prime;
  if (std::isinf(r)) return -std::numeric_limits<double>::infinity();
  const double log_r_r2 = std::log(r) + std::log1p(r);
  return bp * log_r_r2 - (1.0 + 1.5 * bp) * detail::log_one_r_r2(r) - model.log_z;
}

inline double surmise_pdf(double r, const SurmiseModel& model) {
  return std::exp(surmise_logpdf(r, model));
}

/// Finite-N correction ansatz with the Dyson index replaced by beta':
/// C / (1 + r)^2 [ (r + 1/r)^-b - c_b (r + 1/r)^(-1-b) ].
struct CorrectionModel {
  double c_amp = 0.0;
  double c_beta = 0.0;
  double beta_prime = 1.0;
};

inline double correction_pdf(double r, const CorrectionModel& corr) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::DomainError, "correction term needs finite r > 0");
  const double x = r + 1.0 / r;
  const double one_r = 1.0 + r;
  const double lead = std::pow(x, -corr.beta_prime);
  return corr.c_amp / (one_r * one_r) * (lead - corr.c_beta * lead / x);
}

/// c_b that makes the correction integrate to zero for any C, so
/// P + dP stays normalized.
inline double normalizing_c_beta(double bp) {
  auto term = [bp](double extra) {
    return integrate_half_line([bp, extra](double r) {
             if (!(r > 0.0) || !std::isfinite(r)) return 0.0;
             const double x = r + 1.0 / r;
             return std::pow(x, -bp - extra) / ((1.0 + r) * (1.0 + r));
           }).value;
  };
  return term(0.0) / term(1.0);
}

/// Smallest value of P + dP on a log grid over [lo, hi]. Negative results are
/// reported to the caller rather than clamped.
inline double min_corrected_density(const SurmiseModel& model, const CorrectionModel& corr,
                                    double lo = 1e-3, double hi = 1e3, std::size_t points = 400) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    lowest = std::min(lowest, surmise_pdf(r, model) + correction_pdf(r, corr));
  }
  return lowest;
}

/// Ratio density of uncorrelated levels:
/// (2k-1)! / ((k-1)!)^2 * r^(k-1) / (1 + r)^(2k).
inline double poisson_kth_logpdf(double r, std::size_t k) {
  require(r > 0.0, ErrorCode::DomainError, "Poisson ratio density needs r > 0");
  require(k >= 1, ErrorCode::DomainError, "ratio order k must be >= 1");
  const auto kd = static_cast<double>(k);
  const double log_coeff = std::lgamma(2.0 * kd) - 2.0 * std::lgamma(kd);
  return log_coeff + (kd - 1.0) * std::log(r) - 2.0 * kd * std::log1p(r);
}

inline double poisson_kth_pdf(double r, std::size_t k) { return std::exp(poisson_kth_logpdf(r, k)); }

struct TailExponents {
  double small_r;
  double large_r;
};

/// P(r, b) ~ r^b as r -> 0 and ~ r^(-2-b) as r -> inf.
inline TailExponents asymptotic_exponents(double bp) { return {bp, -2.0 - bp}; }

/// Uncorrelated levels: r^(k-1) and r^(-k-1), i.e. the b = k - 1 case.
inline TailExponents poisson_asymptotic_exponents(std::size_t k) {
  const auto kd = static_cast<double>(k);
  return {kd - 1.0, -kd - 1.0};
}

/// CDF of a ratio density tabulated in t = r / (1 + r) on a uniform grid,
/// interpolated by cubic Hermite segments that use the density as slope.
/// Supports evaluation and inversion (for inverse-CDF sampling).
class ModelCdf {
 public:
  /// `density_t` is the density of t on [0, 1]; it need not be normalized.
  ModelCdf(std::function<double(double)> density_t, std::size_t panels = 4096)
      : nodes_(panels + 1), cdf_(panels + 1), slope_(panels + 1) {
    require(panels >= 2, ErrorCode::InvalidArgument, "ModelCdf needs at least two panels");
    const double h = 1.0 / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t i = 0; i <= panels; ++i) {
      const double t = static_cast<double>(i) * h;
      nodes_[i] = t;
      slope_[i] = density_t(t);
      if (i > 0) {
        const auto panel = detail::kronrod15(density_t, nodes_[i - 1], t);
        acc += panel.value;
      }
      cdf_[i] = acc;
    }
    raw_total_ = acc;
    for (std::size_t i = 0; i <= panels; ++i) {
      cdf_[i] /= acc;
      slope_[i] /= acc;
    }
    cdf_.back() = 1.0;
    step_ = h;
  }

  static ModelCdf surmise(const SurmiseModel& model, std::size_t panels = 4096) {
    const double bp = model.beta_prime;
    const double log_z = model.log_z;
    return ModelCdf(
        [bp, log_z](double t) {
          if (t <= 0.0 || t >= 1.0) return bp == 0.0 ? std::exp(-log_z) : 0.0;
          return std::exp(detail::log_surmise_density_t(t, bp) - log_z);
        },
        panels);
  }

  /// In t the order-k Poisson ratio is Beta(k, k).
  static ModelCdf poisson(std::size_t k, std::size_t panels = 4096) {
    require(k >= 1, ErrorCode::DomainError, "ratio order k must be >= 1");
    const auto kd = static_cast<double>(k);
    const double log_coeff = std::lgamma(2.0 * kd) - 2.0 * std::lgamma(kd);
    return ModelCdf(
        [kd, log_coeff](double t) {
          if (kd == 1.0) return 1.0;
          if (t <= 0.0 || t >= 1.0) return 0.0;
          return std::exp(log_coeff + (kd - 1.0) * (std::log(t) + std::log1p(-t)));
        },
        panels);
  }

  /// Integral of the supplied density before normalization.
  double raw_total() const { return raw_total_; }

  double cdf_t(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const std::size_t i = std::min(static_cast<std::size_t>(t / step_), nodes_.size() - 2);
    const double s = (t - nodes_[i]) / step_;
    return hermite(i, s);
  }

  double cdf(double r) const {
    if (!(r > 0.0)) return 0.0;
    if (std::isinf(r)) return 1.0;
    return cdf_t(r / (1.0 + r));
  }

  /// t with cdf_t(t) = u.
  double quantile_t(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    i = std::clamp<std::size_t>(i, 1, cdf_.size() - 1) - 1;
    // Safeguarded Newton on the Hermite segment.
    double lo = 0.0, hi = 1.0, s = (u - cdf_[i]) / std::max(cdf_[i + 1] - cdf_[i], 1e-300);
    s = std::clamp(s, 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
      const double f = hermite(i, s) - u;
      if (f > 0.0) {
        hi = s;
      } else {
        lo = s;
      }
      const double df = hermite_derivative(i, s);
      double next = df > 0.0 ? s - f / df : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) < 1e-15) {
        s = next;
        break;
      }
      s = next;
    }
    return nodes_[i] + s * step_;
  }

  /// r with cdf(r) = u.
  double quantile(double u) const {
    const double t = quantile_t(u);
    return t / (1.0 - t);
  }

 private:
  double hermite(std::size_t i, double s) const {
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * cdf_[i] + (s3 - 2.0 * s2 + s) * step_ * slope_[i] +
           (-2.0 * s3 + 3.0 * s2) * cdf_[i + 1] + (s3 - s2) * step_ * slope_[i + 1];
  }

  double hermite_derivative(std::size_t i, double s) const {
    const double s2 = s * s;
    return (6.0 * s2 - 6.0 * s) * (cdf_[i] - cdf_[i + 1]) + (3.0 * s2 - 4.0 * s + 1.0) * step_ * slope_[i] +
           (3.0 * s2 - 2.0 * s) * step_ * slope_[i + 1];
  }

  std::vector<double> nodes_;
  std::vector<double> cdf_;
  std::vector<double> slope_;
  double step_ = 0.0;
  double raw_total_ = 0.0;
};

}  // namespace rmtratio
