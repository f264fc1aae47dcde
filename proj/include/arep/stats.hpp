// Copyright 2026 the arep authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "arep/errors.hpp"

namespace arep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- normal law

inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

/// Inverse standard-normal CDF: Acklam's rational approximation polished by
/// one Halley step against erfc, accurate to ~1e-15 on (0,1).
inline double normal_quantile(double u) {
  if (u <= 0.0) return -kInf;
  if (u >= 1.0) return kInf;
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  double e = normal_cdf(x) - u;
  double v = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= v / (1.0 + 0.5 * x * v);
  return x;
}

// ------------------------------------------------------- incomplete beta / t

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, dd = 1.0 - qab * x / qap;
  if (std::fabs(dd) < tiny) dd = tiny;
  dd = 1.0 / dd;
  double h = dd;
  for (int m = 1; m <= 300; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    dd = 1.0 + aa * dd;
    if (std::fabs(dd) < tiny) dd = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    h *= dd * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    dd = 1.0 + aa * dd;
    if (std::fabs(dd) < tiny) dd = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    double del = dd * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
  return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

inline double student_t_pdf(double x, double nu) {
  double ln = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
              0.5 * std::log(nu * M_PI) -
              0.5 * (nu + 1.0) * std::log1p(x * x / nu);
  return std::exp(ln);
}

inline double student_t_cdf(double x, double nu) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  double w = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x >= 0.0 ? 1.0 - w : w;
}

/// Inverse t CDF by safeguarded Newton (bisection bracket kept throughout).
inline double student_t_quantile(double u, double nu) {
  if (u <= 0.0) return -kInf;
  if (u >= 1.0) return kInf;
  if (u == 0.5) return 0.0;
  double x = normal_quantile(u);
  if (nu > 2.0) x *= std::sqrt(nu / (nu - 2.0));
  double lo = x, hi = x, step = 1.0 + std::fabs(x);
  while (student_t_cdf(lo, nu) > u) lo -= step, step *= 2.0;
  step = 1.0 + std::fabs(x);
  while (student_t_cdf(hi, nu) < u) hi += step, step *= 2.0;
  x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double f = student_t_cdf(x, nu) - u;
    if (f > 0)
      hi = x;
    else
      lo = x;
    double g = student_t_pdf(x, nu);
    double nx = x - f / g;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) < 1e-14 * (1.0 + std::fabs(x))) return nx;
    x = nx;
  }
  return x;
}

// ------------------------------------------------------- descriptive helpers

inline double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance_of(std::span<const double> v) {
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

/// Linear-interpolated sample quantile (numpy's default, type 7).
inline double percentile_of(std::vector<double> v, double p) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  double h = p * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

inline double median_of(std::vector<double> v) { return percentile_of(std::move(v), 0.5); }

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys) {
  LinearFit f;
  std::size_t n = xs.size();
  double mx = mean_of(xs), my = mean_of(ys), sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  if (syy > 0) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = ys[i] - (f.intercept + f.slope * xs[i]);
      ssr += e * e;
    }
    f.r2 = 1.0 - ssr / syy;
  }
  return f;
}

// ------------------------------------------------------------- content hash

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace arep
