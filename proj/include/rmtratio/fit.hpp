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
#include <span>
#include <vector>

#include "rmtratio/error.hpp"
#include "rmtratio/models.hpp"
#include "rmtratio/ratios.hpp"
#include "rmtratio/rng.hpp"

namespace rmtratio {

/// Log-likelihood of the surmise family for a fixed sample. The sum of
/// surmise_logpdf over the sample is regrouped into two sufficient
/// statistics so each evaluation costs one normalization integral:
///   l(b) = b * sum log(r + r^2) - (1 + 3b/2) * sum log(1 + r + r^2) - n log Z(b).
class SurmiseLikelihood {
 public:
  explicit SurmiseLikelihood(std::span<const double> values) : n_(values.size()) {
    require(!values.empty(), ErrorCode::EmptySeries, "likelihood of an empty series");
    long double s1 = 0.0L, s2 = 0.0L;
    for (double r : values) {
      require(r > 0.0 && std::isfinite(r), ErrorCode::DomainError, "ratios must be positive and finite");
      s1 += std::log(r) + std::log1p(r);
      s2 += detail::log_one_r_r2(r);
    }
    sum_log_r_r2_ = static_cast<double>(s1);
    sum_log_one_r_r2_ = static_cast<double>(s2);
  }

  double operator()(double bp) const {
    return bp * sum_log_r_r2_ - (1.0 + 1.5 * bp) * sum_log_one_r_r2_ -
           static_cast<double>(n_) * log_normalization_constant(bp, false);
  }

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double sum_log_r_r2_ = 0.0;
  double sum_log_one_r_r2_ = 0.0;
};

struct MleOptions {
  double lower = 0.0;
  double upper = 60.0;
  double tolerance = 1e-6;
  double ci_drop = 1.92;  // half the 95% chi-square(1) quantile
  int max_iterations = 500;
};

struct MleResult {
  double beta_prime_hat = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double ci_halfwidth = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;       // false when the maximum sits on the upper bound
  bool at_lower_bound = false;  // b = 0 is a legitimate boundary maximum
};

namespace detail {

struct ScalarMinimum {
  double x;
  double fx;
  int iterations;
  bool ok;
};

// Brent's minimizer: golden-section steps, switching to parabolic
// interpolation once three points bracket the minimum well.
template <typename F>
ScalarMinimum brent_minimize(F&& f, double a, double b, double tol, int max_iter) {
  constexpr double kGolden = 0.3819660112501051;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const double mid = 0.5 * (a + b);
    const double tol1 = tol + 1e-10 * std::abs(x);
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) return {x, fx, iter, true};
    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = mid > x ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= mid) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, max_iter, false};
}

// Root of g on [a, b] where g(a) and g(b) differ in sign.
template <typename G>
double bisect(G&& g, double a, double b, double tol) {
  double ga = g(a);
  for (int iter = 0; iter < 200 && b - a > tol; ++iter) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Maximum-likelihood effective index for a ratio sample, with a
/// profile-likelihood interval (log-likelihood drop of 1.92 on each side).
inline MleResult fit_beta_prime_mle(std::span<const double> values, const MleOptions& opts = {}) {
  require(!values.empty(), ErrorCode::EmptySeries, "cannot fit an empty series");
  const SurmiseLikelihood loglik(values);
  const auto best = detail::brent_minimize([&](double b) { return -loglik(b); }, opts.lower, opts.upper,
                                           opts.tolerance, opts.max_iterations);
  if (!best.ok) {
    fail(ErrorCode::OptimizerNonconvergence,
         "no convergence after " + std::to_string(best.iterations) + " iterations");
  }
  MleResult out;
  out.iterations = best.iterations;
  out.beta_prime_hat = best.x;
  out.log_likelihood = -best.fx;
  const double edge = 10.0 * opts.tolerance;
  out.converged = opts.upper - best.x > edge;
  out.at_lower_bound = best.x - opts.lower <= edge;
  if (out.at_lower_bound) {
    out.beta_prime_hat = opts.lower;
    out.log_likelihood = loglik(opts.lower);
  }

  const double target = out.log_likelihood - opts.ci_drop;
  auto excess = [&](double b) { return loglik(b) - target; };
  const double bhat = out.beta_prime_hat;
  out.ci_lower = (bhat <= opts.lower || excess(opts.lower) >= 0.0)
                     ? opts.lower
                     : detail::bisect(excess, opts.lower, bhat, 1e-8);
  out.ci_upper = (bhat >= opts.upper || excess(opts.upper) >= 0.0)
                     ? opts.upper
                     : detail::bisect(excess, bhat, opts.upper, 1e-8);
  out.ci_halfwidth = 0.5 * (out.ci_upper - out.ci_lower);
  return out;
}

inline MleResult fit_beta_prime_mle(const RatioSeries& series, const MleOptions& opts = {}) {
  return fit_beta_prime_mle(std::span<const double>(series.values), opts);
}

/// Percentile-bootstrap half-width of the 95% interval for b-hat.
inline double bootstrap_ci_halfwidth(std::span<const double> values, std::size_t replicates,
                                     std::uint64_t seed, const MleOptions& opts = {}) {
  require(!values.empty(), ErrorCode::EmptySeries, "cannot bootstrap an empty series");
  require(replicates >= 20, ErrorCode::InvalidArgument, "bootstrap needs at least 20 replicates");
  std::vector<double> estimates;
  estimates.reserve(replicates);
  std::vector<double> resample(values.size());
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    RngStream rng(seed, rep);
    for (double& x : resample) x = values[rng.next_u64() % values.size()];
    estimates.push_back(fit_beta_prime_mle(resample, opts).beta_prime_hat);
  }
  std::sort(estimates.begin(), estimates.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(estimates.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, estimates.size() - 1);
    return estimates[lo] + (pos - static_cast<double>(lo)) * (estimates[hi] - estimates[lo]);
  };
  return 0.5 * (quantile(0.975) - quantile(0.025));
}

}  // namespace rmtratio
