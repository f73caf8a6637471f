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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// all of them pass. Sample sizes and tolerances are fixed here, not tuned.

#include <sys/wait.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rmtratio/rmtratio.hpp"

namespace {

using namespace rmtratio;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

RatioSeries surmise_mode_ratios(std::size_t k, double beta, std::size_t trials, std::uint64_t seed) {
  const EnsembleSpec spec{beta, 2 * k + 1, MatrixModel::TridiagonalBeta, 0.5};
  return collect_ratios({spec, k, trials, 1.0, seed, workers(), 0}).series;
}

Outcome scaling_table() {
  struct Row {
    std::size_t k;
    double beta;
    double expected;
  };
  Outcome o;
  int bad = 0;
  for (const Row& r : {Row{1, 1, 1}, Row{2, 1, 4}, Row{3, 1, 8}, Row{4, 1, 13}, Row{5, 1, 19}, Row{2, 2, 7},
                       Row{3, 2, 14}, Row{2, 4, 13}}) {
    if (beta_prime(r.k, r.beta) != r.expected) ++bad;
  }
  o.check(bad == 0, std::to_string(8 - bad) + "/8 entries exact");
  return o;
}

Outcome normalization() {
  Outcome o;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double worst = 0.0;
  for (double bp : {0.0, 1.0, 2.0, 4.0, 7.0, 8.0, 13.0, 14.0}) {
    const SurmiseModel m = SurmiseModel::make(bp);
    auto pdf_t = [&m](double t) {
      if (t <= 0.0 || t >= 1.0) return m.beta_prime == 0.0 ? 1.0 / m.z_norm : 0.0;
      return surmise_pdf(t / (1.0 - t), m) / ((1.0 - t) * (1.0 - t));
    };
    const double total = Rule::integrate(pdf_t, 0.0, 0.5, 15, 1e-14) + Rule::integrate(pdf_t, 0.5, 1.0, 15, 1e-14);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  o.check(worst <= 1e-8, fmt("max |integral - 1| = %.2e (<= 1e-8)", worst));
  const double z0 = normalization_constant(0.0);
  const double closed = 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0));
  o.check(std::abs(z0 - closed) <= 1e-8 * closed, fmt("Z(0) = %.12f", z0) + fmt(" vs 2pi/(3 sqrt 3) = %.12f", closed));
  return o;
}

Outcome asymptotic_slopes() {
  Outcome o;
  double worst = 0.0;
  const double h = 1e-4;
  for (double bp : {1.0, 4.0, 7.0, 14.0}) {
    const SurmiseModel m = SurmiseModel::make(bp);
    auto slope = [&](double r) {
      return (surmise_logpdf(r * std::exp(h), m) - surmise_logpdf(r * std::exp(-h), m)) / (2.0 * h);
    };
    const TailExponents ex = asymptotic_exponents(bp);
    worst = std::max({worst, std::abs(slope(1e-4) - ex.small_r), std::abs(slope(1e4) - ex.large_r)});
  }
  o.check(worst <= 1e-3, fmt("max slope error %.2e (<= 1e-3)", worst));
  return o;
}

Outcome duality() {
  Outcome o;
  double worst = 0.0;
  for (double bp : {0.0, 1.0, 2.0, 4.0, 7.0, 8.0, 13.0, 14.0}) {
    const SurmiseModel m = SurmiseModel::make(bp);
    for (double r : log_grid(1e-2, 1e2, 200)) {
      const double p = surmise_pdf(r, m);
      worst = std::max(worst, std::abs(p - surmise_pdf(1.0 / r, m) / (r * r)) / p);
    }
  }
  o.check(worst <= 1e-12, fmt("max relative duality defect %.2e (<= 1e-12)", worst));
  const double d = duality_test(surmise_mode_ratios(2, 1.0, 1000000, 101)).ks_statistic;
  o.check(d <= 0.005, fmt("KS(r, 1/r) = %.5f on 1e6 GOE k=2 ratios (<= 0.005)", d));
  return o;
}

Outcome second_order_tails() {
  Outcome o;
  const RatioSeries s = surmise_mode_ratios(2, 1.0, 10000000, 102);
  try {
    const TailFit small = tail_exponent(s, TailSide::SmallR, {0.02, 0.2, 500});
    o.check(small.slope >= 3.5 && small.slope <= 4.5,
            fmt("small-r slope %.3f", small.slope) + fmt(" +- %.3f in [3.5, 4.5]", small.stderr_slope));
  } catch (const Error& e) {
    o.check(false, std::string("small-r fit failed: ") + e.what());
  }
  try {
    const TailFit large = tail_exponent(s, TailSide::LargeR, {5.0, 50.0, 500});
    o.check(large.slope >= -6.5 && large.slope <= -5.5,
            fmt("large-r slope %.3f", large.slope) + fmt(" +- %.3f in [-6.5, -5.5]", large.stderr_slope));
  } catch (const Error& e) {
    o.check(false, std::string("large-r fit failed: ") + e.what());
  }
  return o;
}

Outcome general_k() {
  Outcome o;
  const double b31 = fit_beta_prime_mle(surmise_mode_ratios(3, 1.0, 1000000, 103)).beta_prime_hat;
  o.check(b31 >= 7.5 && b31 <= 8.5, fmt("k=3 beta=1: b-hat %.3f in [7.5, 8.5]", b31));
  const double b22 = fit_beta_prime_mle(surmise_mode_ratios(2, 2.0, 1000000, 104)).beta_prime_hat;
  o.check(b22 >= 6.6 && b22 <= 7.4, fmt("k=2 beta=2: b-hat %.3f in [6.6, 7.4]", b22));
  return o;
}

Outcome large_n() {
  Outcome o;
  const EnsembleSpec spec{1.0, 200, MatrixModel::TridiagonalBeta, 0.5};
  const RatioSeries s = collect_ratios({spec, 2, 2000, 0.5, 105, workers(), 0}).series;
  const double d = ks_distance(s, ModelCdf::surmise(SurmiseModel::make(4.0)));
  o.check(d <= 0.02, fmt("KS vs P(r, 4) = %.4f (<= 0.02)", d) + ", " + std::to_string(s.size()) + " ratios");
  return o;
}

Outcome poisson() {
  Outcome o;
  RngStream rng(106, 0);
  const Spectrum levels = sample_poisson_spectrum(1000000, rng);
  for (std::size_t k = 1; k <= 3; ++k) {
    const RatioSeries s = kth_order_ratios(levels, k);
    const double d = ks_distance(s, ModelCdf::poisson(k));
    const std::string tag = "k=" + std::to_string(k);
    o.check(d <= 0.005, tag + fmt(" KS %.4f", d));
    const TailExponents ex = poisson_asymptotic_exponents(k);
    try {
      const double a = tail_exponent(s, TailSide::SmallR, kDefaultSmallWindow).slope;
      const double b = tail_exponent(s, TailSide::LargeR, kDefaultLargeWindow).slope;
      o.check(std::abs(a - ex.small_r) <= 0.3 && std::abs(b - ex.large_r) <= 0.3,
              tag + fmt(" slopes %.3f", a) + fmt(" / %.3f", b));
    } catch (const Error& e) {
      o.check(false, tag + " tail fit failed: " + e.what());
    }
    if (k == 1) {
      const double bhat = fit_beta_prime_mle(s).beta_prime_hat;
      o.check(bhat <= 0.05, fmt("k=1 b-hat %.4f (<= 0.05)", bhat));
    }
  }
  return o;
}

Outcome fitter_self_consistency() {
  Outcome o;
  const ModelCdf cdf = ModelCdf::surmise(SurmiseModel::make(4.0));
  std::vector<double> draws(1000000);
  int covered = 0;
  double first = 0.0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    RngStream rng(107, rep);
    for (double& x : draws) x = cdf.quantile(rng.uniform());
    const MleResult fit = fit_beta_prime_mle(draws);
    if (rep == 0) first = fit.beta_prime_hat;
    if (fit.ci_lower <= 4.0 && 4.0 <= fit.ci_upper) ++covered;
  }
  o.check(first >= 3.95 && first <= 4.05, fmt("b-hat %.4f in [3.95, 4.05]", first));
  o.check(covered >= 45, std::to_string(covered) + "/50 intervals cover 4 (>= 45)");
  return o;
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::current_path() / "acceptance_determinism";
  fs::remove_all(dir);
  std::vector<std::string> reports;
  for (int w : {1, 4, 16}) {
    const fs::path out = dir / ("w" + std::to_string(w)) / "report.json";
    const std::string cmd = std::string(RMTRATIO_CLI_PATH) + " verify --k 2 --beta 1 --trials 1e5 --seed 108 --workers " +
                            std::to_string(w) + " --out " + out.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (rc != 0 && rc != 1) {
      o.check(false, "verify exited with " + std::to_string(rc));
      return o;
    }
    std::ifstream in(out, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    reports.push_back(ss.str());
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1] && reports[0] == reports[2];
  o.check(same, std::string(same ? "identical" : "different") + " JSON (" + std::to_string(reports[0].size()) +
                    " bytes) for 1, 4 and 16 workers");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"scaling table beta'(k, beta)", scaling_table},
      {"surmise normalization", normalization},
      {"analytic tail exponents", asymptotic_slopes},
      {"duality identity and r <-> 1/r symmetry", duality},
      {"k=2 GOE tail exponents at N=5", second_order_tails},
      {"general-k fitted index", general_k},
      {"large-N bulk agreement", large_n},
      {"uncorrelated levels", poisson},
      {"fitter self-consistency", fitter_self_consistency},
      {"verify determinism across workers", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %zu: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
