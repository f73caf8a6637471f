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

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <vector>

#include "rmtratio/error.hpp"

namespace rmtratio {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  std::size_t max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> nodes, weights;

  explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t m = 2; m <= n; ++m) {
          const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / static_cast<double>(m);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double step = p1 / dp;
        x -= step;
        if (std::abs(step) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <typename F>
  double apply(F& f, double a, double b) const {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(center + half * nodes[i]);
    return s * half;
  }
};

template <typename F, typename Rule>
bool adaptive(F& f, double a, double b, const QuadratureOptions& opts, Rule rule,
              QuadratureResult& out) {
  std::priority_queue<Panel> heap;
  Panel first = rule(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  while (error > opts.abs_tol && heap.size() < opts.max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = rule(f, worst.a, mid);
    const Panel right = rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running totals.
  double value = 0.0;
  double err = 0.0;
  out.panels = heap.size();
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = err;
  return err <= opts.abs_tol;
}

}  // namespace detail

/// Adaptive integration of f over [a, b]. Gauss-Kronrod 7/15 panels are
/// bisected worst-first until the summed error estimate is below abs_tol;
/// if the panel budget runs out the integral is retried with 20/40-point
/// Gauss-Legendre panels before giving up.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  QuadratureResult result;
  if (detail::adaptive(f, a, b, opts, [](auto& g, double x, double y) { return detail::kronrod15(g, x, y); },
                       result)) {
    return result;
  }
  static const detail::GaussLegendre low(20);
  static const detail::GaussLegendre high(40);
  auto legendre_pair = [](auto& g, double x, double y) {
    const double coarse = low.apply(g, x, y);
    const double fine = high.apply(g, x, y);
    return detail::Panel{x, y, fine, std::abs(fine - coarse)};
  };
  if (detail::adaptive(f, a, b, opts, legendre_pair, result)) return result;
  fail(ErrorCode::QuadratureNonconvergence,
       "adaptive quadrature did not reach tolerance (estimate " + std::to_string(result.error) + ")");
}

/// Integral of f over [0, inf) through r = t / (1 - t).
template <typename F>
QuadratureResult integrate_half_line(F&& f, const QuadratureOptions& opts = {}) {
  auto g = [&f](double t) {
    const double one_minus = 1.0 - t;
    return f(t / one_minus) / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, opts);
}

}  // namespace rmtratio
