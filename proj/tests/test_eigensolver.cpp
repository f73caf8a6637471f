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

// Eigenvalues are checked against Eigen's self-adjoint solver.

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "rmtratio/eigensolver.hpp"
#include "rmtratio/ensembles.hpp"
#include "rmtratio/rng.hpp"

namespace rmtratio {
namespace {

std::vector<double> eigen_reference(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  std::sort(ev.begin(), ev.end());
  return ev;
}

TEST(Eigensolver, RealSymmetricMatchesEigen) {
  RngStream rng(21, 0);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 17u, 40u}) {
    HermitianMatrix<double> a(n);
    Eigen::MatrixXcd ref(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = rng.normal();
        a.set_pair(i, j, v);
        ref(i, j) = v;
        ref(j, i) = v;
      }
    }
    const auto got = hermitian_eigenvalues(a);
    const auto want = eigen_reference(ref);
    ASSERT_EQ(got.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-10) << "n=" << n << " i=" << i;
  }
}

TEST(Eigensolver, ComplexHermitianMatchesEigen) {
  RngStream rng(22, 0);
  for (std::size_t n : {2u, 3u, 6u, 13u, 30u}) {
    HermitianMatrix<std::complex<double>> a(n);
    Eigen::MatrixXcd ref(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const std::complex<double> v(rng.normal(), rng.normal());
        a.set_pair(i, j, v);
        ref(i, j) = v;
        ref(j, i) = std::conj(v);
      }
      const double d = rng.normal();
      a.set_pair(i, i, d);
      ref(i, i) = d;
    }
    const auto got = hermitian_eigenvalues(a);
    const auto want = eigen_reference(ref);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-10) << "n=" << n << " i=" << i;
  }
}

TEST(Eigensolver, DiagonalAndRepeatedEigenvalues) {
  SymTridiagonal t{{3.0, 1.0, 2.0, 1.0}, {0.0, 0.0, 0.0}};
  EXPECT_EQ(tridiagonal_eigenvalues(t), (std::vector<double>{1.0, 1.0, 2.0, 3.0}));
}

TEST(Eigensolver, BisectionAgreesWithQl) {
  RngStream rng(23, 0);
  const auto t = tridiagonal_beta_matrix({1.5, 25, MatrixModel::TridiagonalBeta, 0.5}, rng);
  const auto ql = tridiagonal_eigenvalues(t);
  const auto bis = bisection_eigenvalues(t);
  ASSERT_EQ(ql.size(), bis.size());
  for (std::size_t i = 0; i < ql.size(); ++i) EXPECT_NEAR(ql[i], bis[i], 1e-11);
}

// Property: the Sturm count brackets exactly one root around each
// eigenvalue, and the eigenvalues sum to the trace.
TEST(Eigensolver, SturmBracketsAndTraceOnSampledMatrices) {
  for (double beta : {1.0, 2.0, 4.0, 0.7}) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      RngStream rng(24, trial);
      const auto t = tridiagonal_beta_matrix({beta, 12, MatrixModel::TridiagonalBeta, 0.5}, rng);
      const auto ev = tridiagonal_eigenvalues(t);
      double sum = 0.0;
      for (std::size_t i = 0; i < ev.size(); ++i) {
        sum += ev[i];
        const double gap_lo = i == 0 ? 1.0 : ev[i] - ev[i - 1];
        const double gap_hi = i + 1 == ev.size() ? 1.0 : ev[i + 1] - ev[i];
        const double tol = std::min({1e-9, 0.5 * gap_lo, 0.5 * gap_hi});
        ASSERT_EQ(sturm_count(t, ev[i] + tol) - sturm_count(t, ev[i] - tol), 1u);
      }
      const double tr = t.trace();
      EXPECT_NEAR(sum, tr, 1e-10 * std::max(1.0, std::abs(tr)) + 1e-12);
    }
  }
}

}  // namespace
}  // namespace rmtratio
