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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmtratio/eigensolver.hpp"
#include "rmtratio/error.hpp"
#include "rmtratio/rng.hpp"

namespace rmtratio {

enum class MatrixModel { DenseGaussian, TridiagonalBeta, PoissonUncorrelated };

inline std::string_view to_string(MatrixModel m) {
  switch (m) {
    case MatrixModel::DenseGaussian: return "dense";
    case MatrixModel::TridiagonalBeta: return "tridiagonal";
    case MatrixModel::PoissonUncorrelated: return "poisson";
  }
  return "unknown";
}

inline MatrixModel parse_matrix_model(std::string_view name) {
  if (name == "dense") return MatrixModel::DenseGaussian;
  if (name == "tridiagonal") return MatrixModel::TridiagonalBeta;
  if (name == "poisson") return MatrixModel::PoissonUncorrelated;
  fail(ErrorCode::InvalidArgument, "unknown matrix model '" + std::string(name) +
                                       "' (expected dense, tridiagonal or poisson)");
}

/// Which ensemble to sample. `scale_a` is the Gaussian weight A in
/// exp(-A * sum E^2); ratio statistics do not depend on it.
struct EnsembleSpec {
  double beta = 1.0;
  std::size_t n = 3;
  MatrixModel model = MatrixModel::TridiagonalBeta;
  double scale_a = 0.5;

  void validate() const {
    require(n >= 2, ErrorCode::InvalidArgument, "matrix dimension n must be >= 2");
    require(scale_a > 0.0 && std::isfinite(scale_a), ErrorCode::InvalidArgument,
            "scale_a must be positive");
    if (model == MatrixModel::PoissonUncorrelated) return;
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidArgument, "beta must be > 0");
    if (model == MatrixModel::DenseGaussian) {
      require(beta == 1.0 || beta == 2.0 || beta == 4.0, ErrorCode::InvalidArgument,
              "dense Gaussian sampler supports beta in {1, 2, 4} only");
    }
  }
};

/// One realization: ascending eigenvalues plus where they came from.
struct Spectrum {
  std::vector<double> eigenvalues;
  EnsembleSpec spec;
  std::uint64_t seed_tag = 0;

  std::size_t size() const { return eigenvalues.size(); }
};

/// GOE / GUE / GSE by dense sampling with density proportional to
/// exp(-A tr H^2) (for GSE, A/2 times the trace of the 2n x 2n complex
/// embedding). Diagonal entries have variance 1/(2A), every real component
/// of an off-diagonal entry 1/(4A).
inline Spectrum sample_dense_gaussian(const EnsembleSpec& spec, RngStream& rng) {
  require(spec.model == MatrixModel::DenseGaussian, ErrorCode::InvalidArgument,
          "sample_dense_gaussian needs model = dense");
  spec.validate();
  const std::size_t n = spec.n;
  const double diag_sd = 1.0 / std::sqrt(2.0 * spec.scale_a);
  const double off_sd = 1.0 / (2.0 * std::sqrt(spec.scale_a));

  std::vector<double> ev;
  if (spec.beta == 1.0) {
    HermitianMatrix<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      h(i, i) = diag_sd * rng.normal();
      for (std::size_t j = i + 1; j < n; ++j) h.set_pair(i, j, off_sd * rng.normal());
    }
    ev = hermitian_eigenvalues(h);
  } else if (spec.beta == 2.0) {
    HermitianMatrix<std::complex<double>> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      h(i, i) = diag_sd * rng.normal();
      for (std::size_t j = i + 1; j < n; ++j) {
        const double re = off_sd * rng.normal();
        const double im = off_sd * rng.normal();
        h.set_pair(i, j, {re, im});
      }
    }
    ev = hermitian_eigenvalues(h);
  } else {
    // Quaternion q = a0 + a1 i + a2 j + a3 k embedded as
    // [[a0 + i a1, a2 + i a3], [-a2 + i a3, a0 - i a1]].
    HermitianMatrix<std::complex<double>> h(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a0 = diag_sd * rng.normal();
      h(2 * i, 2 * i) = a0;
      h(2 * i + 1, 2 * i + 1) = a0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double q0 = off_sd * rng.normal();
        const double q1 = off_sd * rng.normal();
        const double q2 = off_sd * rng.normal();
        const double q3 = off_sd * rng.normal();
        h.set_pair(2 * i, 2 * j, {q0, q1});
        h.set_pair(2 * i, 2 * j + 1, {q2, q3});
        h.set_pair(2 * i + 1, 2 * j, {-q2, q3});
        h.set_pair(2 * i + 1, 2 * j + 1, {q0, -q1});
      }
    }
    const std::vector<double> doubled = hermitian_eigenvalues(h);
    ev.reserve(n);
    // Kramers pairs: keep every second sorted eigenvalue.
    for (std::size_t i = 0; i < n; ++i) ev.push_back(doubled[2 * i]);
  }
  return Spectrum{std::move(ev), spec, rng.stream_index()};
}

/// Tridiagonal beta-ensemble matrix (Dumitriu-Edelman) for any beta > 0,
/// scaled so its eigenvalue density is proportional to
/// prod |E_i - E_j|^beta exp(-A sum E_i^2).
inline SymTridiagonal tridiagonal_beta_matrix(const EnsembleSpec& spec, RngStream& rng) {
  const std::size_t n = spec.n;
  const double diag_sd = 1.0 / std::sqrt(2.0 * spec.scale_a);
  const double off_scale = 1.0 / (2.0 * std::sqrt(spec.scale_a));
  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = diag_sd * rng.normal();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.offdiag[i] = off_scale * rng.chi(spec.beta * static_cast<double>(n - 1 - i));
  }
  return t;
}

inline Spectrum sample_tridiagonal_beta(const EnsembleSpec& spec, RngStream& rng) {
  require(spec.model == MatrixModel::TridiagonalBeta, ErrorCode::InvalidArgument,
          "sample_tridiagonal_beta needs model = tridiagonal");
  spec.validate();
  return Spectrum{tridiagonal_eigenvalues(tridiagonal_beta_matrix(spec, rng)), spec,
                  rng.stream_index()};
}

/// n levels with iid unit-mean exponential spacings, starting at 0.
inline Spectrum sample_poisson_spectrum(std::size_t n, RngStream& rng) {
  require(n >= 2, ErrorCode::InvalidArgument, "Poisson spectrum needs n >= 2");
  std::vector<double> ev(n);
  double level = 0.0;
  ev[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    level += rng.exponential();
    ev[i] = level;
  }
  EnsembleSpec spec{0.0, n, MatrixModel::PoissonUncorrelated, 0.5};
  return Spectrum{std::move(ev), spec, rng.stream_index()};
}

/// Minimal spectrum for order-k ratios: n = 2k + 1 levels. Uses the
/// tridiagonal sampler unless `dense_cross_check` is set and beta is classical.
inline Spectrum sample_surmise_spectrum(std::size_t k, double beta, RngStream& rng,
                                        bool dense_cross_check = false) {
  require(k >= 1, ErrorCode::InvalidArgument, "ratio order k must be >= 1");
  EnsembleSpec spec{beta, 2 * k + 1, MatrixModel::TridiagonalBeta, 0.5};
  if (dense_cross_check && (beta == 1.0 || beta == 2.0 || beta == 4.0)) {
    spec.model = MatrixModel::DenseGaussian;
    return sample_dense_gaussian(spec, rng);
  }
  return sample_tridiagonal_beta(spec, rng);
}

/// Dispatch on spec.model.
inline Spectrum sample_spectrum(const EnsembleSpec& spec, RngStream& rng) {
  switch (spec.model) {
    case MatrixModel::DenseGaussian: return sample_dense_gaussian(spec, rng);
    case MatrixModel::TridiagonalBeta: return sample_tridiagonal_beta(spec, rng);
    case MatrixModel::PoissonUncorrelated: {
      Spectrum s = sample_poisson_spectrum(spec.n, rng);
      s.spec = spec;
      return s;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown matrix model");
}

}  // namespace rmtratio
