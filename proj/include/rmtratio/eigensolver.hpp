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
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "rmtratio/error.hpp"

namespace rmtratio {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `offdiag` n-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  double trace() const {
    double t = 0.0;
    for (double d : diag) t += d;
    return t;
  }
};

/// Dense Hermitian matrix in row-major storage. Scalar is double or
/// std::complex<double>.
template <typename Scalar>
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n) : n_(n), data_(n * n, Scalar{}) {}

  std::size_t size() const { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  /// Sets the (i, j) entry and its conjugate mirror.
  void set_pair(std::size_t i, std::size_t j, Scalar value) {
    (*this)(i, j) = value;
    (*this)(j, i) = conj_of(value);
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += real_of((*this)(i, i));
    return t;
  }

  static Scalar conj_of(Scalar x) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return x;
    } else {
      return std::conj(x);
    }
  }
  static double real_of(Scalar x) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return x;
    } else {
      return x.real();
    }
  }

 private:
  std::size_t n_;
  std::vector<Scalar> data_;
};

namespace detail {

template <typename Scalar>
double abs2(Scalar x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x * x;
  } else {
    return std::norm(x);
  }
}

}  // namespace detail

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Off-diagonal phases are dropped since a diagonal unitary similarity
/// makes them real and non-negative without changing the spectrum.
template <typename Scalar>
SymTridiagonal householder_tridiagonalize(HermitianMatrix<Scalar> a) {
  using M = HermitianMatrix<Scalar>;
  const std::size_t n = a.size();
  std::vector<Scalar> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail_norm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) tail_norm2 += detail::abs2(a(i, k));
    const double below = tail_norm2 - detail::abs2(a(k + 1, k));
    if (below == 0.0) continue;
    const double norm = std::sqrt(tail_norm2);
    const Scalar x0 = a(k + 1, k);
    Scalar phase{1.0};
    if (std::abs(x0) != 0.0) phase = x0 / std::abs(x0);
    // v = x + phase*|x| e1, scaled to unit length.
    std::fill(v.begin(), v.end(), Scalar{});
    v[k + 1] = x0 + phase * norm;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += detail::abs2(v[i]);
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t i = k + 1; i < n; ++i) v[i] *= inv;

    // p = A v on the trailing block, K = v* p, q = p - K v.
    for (std::size_t i = k; i < n; ++i) {
      Scalar s{};
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = s;
    }
    Scalar kappa{};
    for (std::size_t i = k + 1; i < n; ++i) kappa += M::conj_of(v[i]) * p[i];
    for (std::size_t i = k; i < n; ++i) p[i] -= kappa * v[i];
    // A <- A - 2 v q* - 2 q v*  (v[k] = 0 handles the pivot column).
    for (std::size_t i = k; i < n; ++i) {
      for (std::size_t j = k; j < n; ++j) {
        a(i, j) -= 2.0 * (v[i] * M::conj_of(p[j]) + p[i] * M::conj_of(v[j]));
      }
    }
  }
  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = M::real_of(a(i, i));
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag[i] = std::abs(a(i + 1, i));
  return t;
}

/// Number of eigenvalues of `t` strictly less than x (Sturm sequence count).
inline std::size_t sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t n = t.size();
  const double pivmin = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = t.diag.empty() ? 1.0 : t.diag[0] - x;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) q = t.diag[i] - x - t.offdiag[i - 1] * t.offdiag[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

/// All eigenvalues by Sturm bisection, ascending.
inline std::vector<double> bisection_eigenvalues(const SymTridiagonal& t) {
  const std::size_t n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.offdiag[i - 1]);
    if (i + 1 < n) radius += std::abs(t.offdiag[i]);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }
  const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  lo -= pad;
  hi += pad;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo;
    double b = hi;
    while (b - a > 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)) &&
           b - a > std::numeric_limits<double>::min()) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(t, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

namespace detail {

// Implicit-shift QL on (d, e), eigenvalues only. Returns false if some
// eigenvalue fails to converge within the iteration cap.
inline bool implicit_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return true;
  e.push_back(0.0);
  const double eps = std::numeric_limits<double>::epsilon();
  const int max_iter = 30 * static_cast<int>(n) + 30;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_iter) return false;
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return true;
}

}  // namespace detail

/// Eigenvalues of a symmetric tridiagonal matrix, ascending. Implicit QL,
/// with Sturm bisection as the fallback when QL stalls.
inline std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t) {
  std::vector<double> d = t.diag;
  std::vector<double> e = t.offdiag;
  if (!detail::implicit_ql(d, e)) return bisection_eigenvalues(t);
  std::sort(d.begin(), d.end());
  return d;
}

template <typename Scalar>
std::vector<double> hermitian_eigenvalues(const HermitianMatrix<Scalar>& a) {
  return tridiagonal_eigenvalues(householder_tridiagonalize(a));
}

}  // namespace rmtratio
