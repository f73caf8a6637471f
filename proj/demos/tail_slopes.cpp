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

// Small tour of the library: sample 5x5 GOE matrices, form second-order
// ratios and compare the measured tail slopes and fitted index with the
// predicted ones.

#include <cstdio>

#include "rmtratio/rmtratio.hpp"

int main() {
  using namespace rmtratio;

  const std::size_t k = 2;
  const EnsembleSpec spec{1.0, 2 * k + 1, MatrixModel::TridiagonalBeta, 0.5};
  const Campaign campaign = collect_ratios({spec, k, 1000000, 1.0, 42, 1, 0});
  const RatioSeries& series = campaign.series;

  const double bp = beta_prime(k, spec.beta);
  const TailExponents expected = asymptotic_exponents(bp);
  const MleResult fit = fit_beta_prime_mle(series);

  std::printf("%s, k=%zu: %zu ratios\n", describe(spec).c_str(), k, series.size());
  std::printf("beta' predicted %.3f, fitted %.3f +- %.3f\n", bp, fit.beta_prime_hat, fit.ci_halfwidth);

  for (const TailSide side : {TailSide::SmallR, TailSide::LargeR}) {
    const bool small = side == TailSide::SmallR;
    const TailWindow window = small ? kDefaultSmallWindow : kDefaultLargeWindow;
    const double want = small ? expected.small_r : expected.large_r;
    try {
      const TailFit corrected = tail_exponent(series, side, window, TailModel::AnalyticCorrection);
      const TailFit plain = tail_exponent(series, side, window, TailModel::PowerLaw);
      std::printf("%s tail: expected %+.2f, corrected %+.2f +- %.2f, plain power law %+.2f\n",
                  small ? "small-r" : "large-r", want, corrected.slope, corrected.stderr_slope, plain.slope);
    } catch (const Error& e) {
      std::printf("%s tail: %s\n", small ? "small-r" : "large-r", e.what());
    }
  }

  const ModelCdf cdf = ModelCdf::surmise(SurmiseModel::make(bp));
  std::printf("KS distance to the surmise: %.4f\n", ks_distance(series, cdf));
  std::printf("duality KS(r, 1/r): %.4f\n", duality_test(series).ks_statistic);
  return 0;
}
