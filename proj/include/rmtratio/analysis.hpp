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
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rmtratio/ensembles.hpp"
#include "rmtratio/error.hpp"
#include "rmtratio/fit.hpp"
#include "rmtratio/ks.hpp"
#include "rmtratio/models.hpp"
#include "rmtratio/ratios.hpp"
#include "rmtratio/rng.hpp"
#include "rmtratio/tails.hpp"

namespace rmtratio {

inline constexpr std::string_view kVersion = "1.0.0";

enum class VerifyMode { Surmise, LargeN };

inline std::string_view to_string(VerifyMode m) { return m == VerifyMode::Surmise ? "surmise" : "large_n"; }

inline VerifyMode parse_verify_mode(std::string_view s) {
  if (s == "surmise") return VerifyMode::Surmise;
  if (s == "large_n" || s == "largen" || s == "large-n") return VerifyMode::LargeN;
  fail(ErrorCode::InvalidArgument, "unknown mode '" + std::string(s) + "' (expected surmise or large_n)");
}

struct DualityResult {
  double ks_statistic = 0.0;
  double p_value = 1.0;  // nominal only: r and 1/r are not independent samples
};

/// Two-sample KS between {r_i} and {1/r_i}.
inline DualityResult duality_test(const RatioSeries& series) {
  require(!series.empty(), ErrorCode::EmptySeries, "duality test of an empty series");
  std::vector<double> direct = series.values;
  std::vector<double> inverted(direct.size());
  std::sort(direct.begin(), direct.end());
  // Sorting 1/r is reversing sorted r.
  std::transform(direct.rbegin(), direct.rend(), inverted.begin(), [](double r) { return 1.0 / r; });
  const double d = ks_two_sample_sorted(direct, inverted);
  return {d, ks_two_sample_p_value(d, direct.size(), inverted.size())};
}

/// sup-norm distance between the empirical CDF and a tabulated model CDF.
inline double ks_distance(const RatioSeries& series, const ModelCdf& model) {
  require(!series.empty(), ErrorCode::EmptySeries, "KS distance of an empty series");
  std::vector<double> sorted = series.values;
  std::sort(sorted.begin(), sorted.end());
  return ks_statistic(sorted, [&](double r) { return model.cdf(r); });
}

/// What to sample and how to turn each realization into ratios.
struct CampaignConfig {
  EnsembleSpec spec;
  std::size_t k = 1;
  std::size_t trials = 0;
  double bulk_fraction = 1.0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::uint64_t first_stream = 0;
};

struct Campaign {
  RatioSeries series;
  std::size_t discarded = 0;
};

inline std::string describe(const EnsembleSpec& spec) {
  std::string s(to_string(spec.model));
  if (spec.model != MatrixModel::PoissonUncorrelated) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", spec.beta);
    s += " beta=";
    s += buf;
  }
  s += " n=" + std::to_string(spec.n);
  return s;
}

namespace detail {

inline void run_trials(const CampaignConfig& cfg, std::size_t begin, std::size_t end, std::vector<double>& out,
                       std::size_t& discarded) {
  for (std::size_t t = begin; t < end; ++t) {
    RngStream rng(cfg.seed, cfg.first_stream + t);
    Spectrum s = sample_spectrum(cfg.spec, rng);
    if (cfg.bulk_fraction < 1.0) s = bulk_filter(s, cfg.bulk_fraction);
    try {
      append_kth_order_ratios(s.eigenvalues, cfg.k, out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSpacing) throw;
      ++discarded;
    }
  }
}

}  // namespace detail

/// Samples `trials` realizations (stream index = trial index) and pools
/// their ratios in trial order. Trials are split into contiguous blocks,
/// one per worker, and the blocks are concatenated in order, so the result
/// does not depend on the worker count.
inline Campaign collect_ratios(const CampaignConfig& cfg) {
  cfg.spec.validate();
  require(cfg.k >= 1, ErrorCode::InvalidArgument, "ratio order k must be >= 1");
  require(cfg.trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, cfg.trials);
  std::vector<std::vector<double>> parts(workers);
  std::vector<std::size_t> discarded(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  auto bounds = [&](std::size_t w) { return cfg.trials * w / workers; };

  if (workers == 1) {
    detail::run_trials(cfg, 0, cfg.trials, parts[0], discarded[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          detail::run_trials(cfg, bounds(w), bounds(w + 1), parts[w], discarded[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Campaign c;
  c.series.k = cfg.k;
  c.series.source = {describe(cfg.spec), cfg.bulk_fraction, cfg.trials};
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  c.series.values.reserve(total);
  for (std::size_t w = 0; w < workers; ++w) {
    c.series.values.insert(c.series.values.end(), parts[w].begin(), parts[w].end());
    c.discarded += discarded[w];
  }
  return c;
}

enum class CheckStatus { Pass, Fail, Skipped };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

/// One verdict line: `value` must lie in [lower, upper].
struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  CheckStatus status = CheckStatus::Skipped;
  std::string note;
};

/// Acceptance thresholds embedded in a verification run.
struct Thresholds {
  double beta_tol = 0.5;     // |bhat - predicted| <= beta_tol
  double slope_tol = 0.5;    // |slope - predicted exponent| <= slope_tol
  double ks_max = 0.02;      // KS distance to the reference density
  double duality_max = 0.005;  // KS between {r} and {1/r}
};

/// Defaults by ensemble and mode. KS-type limits are never set below the
/// sampling noise floor (2/sqrt(n) for KS, 5/sqrt(n) for duality).
inline Thresholds default_thresholds(MatrixModel model, VerifyMode mode, std::size_t k, std::size_t ratio_count) {
  Thresholds t;
  const double root = std::sqrt(static_cast<double>(std::max<std::size_t>(ratio_count, 1)));
  if (model == MatrixModel::PoissonUncorrelated) {
    t.beta_tol = 0.05;
    t.slope_tol = 0.3;
    t.ks_max = 0.005;
    t.duality_max = 0.005;
  } else if (mode == VerifyMode::Surmise) {
    t.ks_max = k == 1 ? 0.01 : 0.02;
    t.duality_max = 0.005;
  } else {
    t.ks_max = 0.02;
    t.duality_max = 0.01;
  }
  t.ks_max = std::max(t.ks_max, 2.0 / root);
  t.duality_max = std::max(t.duality_max, 5.0 / root);
  return t;
}

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::optional<double> bulk_fraction;  // default: 1.0 surmise/Poisson, 0.5 large-N Gaussian
  TailWindow small_window = kDefaultSmallWindow;
  TailWindow large_window = kDefaultLargeWindow;
  TailModel tail_model = TailModel::AnalyticCorrection;
  std::size_t workers = 1;
  std::optional<Thresholds> thresholds;  // replaces the defaults wholesale
  // Individual overrides, applied on top of whichever thresholds are in force.
  std::optional<double> beta_tol;
  std::optional<double> slope_tol;
  std::optional<double> ks_max;
  std::optional<double> duality_max;
  std::size_t bootstrap_replicates = 0;  // 0 = profile-likelihood interval only
};

struct SlopeEstimate {
  std::optional<TailFit> fit;         // estimator selected by tail_model
  std::optional<TailFit> power_law;   // plain power-law regression, for reference
  std::string error;                  // set when the window was unusable
};

struct FitReport {
  std::size_t k = 1;
  double beta_input = 0.0;
  MatrixModel model = MatrixModel::TridiagonalBeta;
  VerifyMode mode = VerifyMode::Surmise;
  std::size_t n_levels = 0;
  std::size_t trials = 0;
  double scale_a = 0.5;
  std::uint64_t seed = 0;
  double bulk_fraction = 1.0;
  TailWindow small_window;
  TailWindow large_window;
  TailModel tail_model = TailModel::AnalyticCorrection;

  std::size_t ratio_count = 0;
  std::size_t discarded_realizations = 0;

  double predicted_beta_prime = 0.0;
  MleResult mle;
  double beta_prime_hat = 0.0;
  double beta_prime_ci_halfwidth = 0.0;
  std::optional<double> bootstrap_ci_halfwidth;

  TailExponents predicted_exponents{0.0, -2.0};
  SlopeEstimate slope_small_r;
  SlopeEstimate slope_large_r;

  double ks_distance = 0.0;
  std::string ks_reference;
  DualityResult duality;

  Thresholds thresholds;
  std::vector<Check> checks;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Fail; });
  }
  bool partial() const {
    return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Skipped; });
  }
};

namespace detail {

inline Check range_check(std::string name, double value, double lower, double upper) {
  Check c{std::move(name), value, lower, upper, CheckStatus::Fail, {}};
  if (value >= lower && value <= upper) c.status = CheckStatus::Pass;
  return c;
}

inline SlopeEstimate estimate_slope(const RatioSeries& series, TailSide side, const TailWindow& window,
                                    TailModel model) {
  SlopeEstimate est;
  try {
    est.fit = tail_exponent(series, side, window, model);
    est.power_law = tail_exponent(series, side, window, TailModel::PowerLaw);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTailSamples) throw;
    est.error = e.what();
  }
  return est;
}

}  // namespace detail

/// Full pipeline: sample, trim to the bulk, form order-k ratios, then fit
/// b-hat, regress both tails, test duality and measure the KS distance to
/// the reference density (the surmise at beta'(k, beta), or the exact
/// Poisson law). Every threshold used is stored in the report.
inline FitReport verify_scaling(const EnsembleSpec& spec_in, std::size_t k, std::size_t trials, VerifyMode mode,
                                const VerifyOptions& opts = {}, RatioSeries* series_out = nullptr) {
  require(k >= 1, ErrorCode::InvalidArgument, "ratio order k must be >= 1");
  EnsembleSpec spec = spec_in;
  if (mode == VerifyMode::Surmise) spec.n = 2 * k + 1;
  spec.validate();
  const bool poisson = spec.model == MatrixModel::PoissonUncorrelated;
  const double bulk = opts.bulk_fraction.value_or(mode == VerifyMode::LargeN && !poisson ? 0.5 : 1.0);
  require(bulk > 0.0 && bulk <= 1.0, ErrorCode::InvalidArgument, "bulk fraction must lie in (0, 1]");
  const auto kept = static_cast<std::size_t>(std::ceil(bulk * static_cast<double>(spec.n) * (1.0 - 1e-12)));
  require(kept >= 2 * k + 1, ErrorCode::InsufficientLevels,
          "bulk keeps " + std::to_string(kept) + " levels, order " + std::to_string(k) + " needs " +
              std::to_string(2 * k + 1));
  require(trials >= 1 && trials * (kept - 2 * k) >= 10000, ErrorCode::InvalidArgument,
          "verification needs at least 1e4 ratios (trials x (levels kept - 2k))");

  FitReport rep;
  rep.k = k;
  rep.beta_input = poisson ? 0.0 : spec.beta;
  rep.model = spec.model;
  rep.mode = mode;
  rep.n_levels = spec.n;
  rep.trials = trials;
  rep.scale_a = spec.scale_a;
  rep.seed = opts.seed;
  rep.bulk_fraction = bulk;
  rep.small_window = opts.small_window;
  rep.large_window = opts.large_window;
  rep.tail_model = opts.tail_model;
  rep.predicted_beta_prime = beta_prime(k, rep.beta_input);
  rep.predicted_exponents = poisson ? poisson_asymptotic_exponents(k) : asymptotic_exponents(rep.predicted_beta_prime);

  const Campaign campaign = collect_ratios({spec, k, trials, bulk, opts.seed, opts.workers, 0});
  const RatioSeries& series = campaign.series;
  rep.ratio_count = series.size();
  rep.discarded_realizations = campaign.discarded;
  require(!series.empty(), ErrorCode::EmptySeries, "every realization was discarded");

  rep.mle = fit_beta_prime_mle(series);
  rep.beta_prime_hat = rep.mle.beta_prime_hat;
  rep.beta_prime_ci_halfwidth = rep.mle.ci_halfwidth;
  if (opts.bootstrap_replicates > 0) {
    rep.bootstrap_ci_halfwidth = bootstrap_ci_halfwidth(series.values, opts.bootstrap_replicates, opts.seed);
  }

  rep.slope_small_r = detail::estimate_slope(series, TailSide::SmallR, opts.small_window, opts.tail_model);
  rep.slope_large_r = detail::estimate_slope(series, TailSide::LargeR, opts.large_window, opts.tail_model);

  if (poisson) {
    rep.ks_reference = "poisson_k" + std::to_string(k);
    rep.ks_distance = ks_distance(series, ModelCdf::poisson(k));
  } else {
    rep.ks_reference = "surmise_beta_prime";
    rep.ks_distance = ks_distance(series, ModelCdf::surmise(SurmiseModel::make(rep.predicted_beta_prime)));
  }
  rep.duality = duality_test(series);

  Thresholds th = opts.thresholds.value_or(default_thresholds(spec.model, mode, k, series.size()));
  if (opts.beta_tol) th.beta_tol = *opts.beta_tol;
  if (opts.slope_tol) th.slope_tol = *opts.slope_tol;
  if (opts.ks_max) th.ks_max = *opts.ks_max;
  if (opts.duality_max) th.duality_max = *opts.duality_max;
  rep.thresholds = th;

  Check converged{"mle_converged", rep.mle.converged ? 1.0 : 0.0, 1.0, 1.0,
                  rep.mle.converged ? CheckStatus::Pass : CheckStatus::Fail, {}};
  if (!rep.mle.converged) converged.note = "maximum sits on the upper search bound";
  rep.checks.push_back(converged);

  if (poisson && k > 1) {
    rep.checks.push_back({"beta_prime_hat", rep.beta_prime_hat, 0.0, 0.0, CheckStatus::Skipped,
                          "surmise family does not describe uncorrelated order-k ratios for k > 1"});
  } else {
    rep.checks.push_back(detail::range_check("beta_prime_hat", rep.beta_prime_hat,
                                             rep.predicted_beta_prime - th.beta_tol,
                                             rep.predicted_beta_prime + th.beta_tol));
  }

  auto slope_check = [&](const char* name, const SlopeEstimate& est, double expected) {
    if (!est.fit) return Check{name, 0.0, expected - th.slope_tol, expected + th.slope_tol, CheckStatus::Skipped, est.error};
    return detail::range_check(name, est.fit->slope, expected - th.slope_tol, expected + th.slope_tol);
  };
  rep.checks.push_back(slope_check("slope_small_r", rep.slope_small_r, rep.predicted_exponents.small_r));
  rep.checks.push_back(slope_check("slope_large_r", rep.slope_large_r, rep.predicted_exponents.large_r));
  rep.checks.push_back(detail::range_check("ks_distance", rep.ks_distance, 0.0, th.ks_max));
  rep.checks.push_back(detail::range_check("duality_ks", rep.duality.ks_statistic, 0.0, th.duality_max));
  if (series_out != nullptr) *series_out = series;
  return rep;
}

}  // namespace rmtratio
