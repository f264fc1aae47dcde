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

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "arep/errors.hpp"
#include "arep/params.hpp"
#include "arep/rng.hpp"
#include "arep/stats.hpp"

namespace arep {

/// Absolute-moment table E|eps|^r for the exponents the condition checks
/// need. Entries may be +inf (heavy tails); NaN means "not supplied".
struct MomentsTable {
  double abs_mean = kNaN;    // r = 1
  double second = kNaN;      // r = 2
  double fourth = kNaN;      // r = 4
  double high_order = kNaN;  // r = 8 + beta0
  double mean = 0.0;         // signed E eps

  double require(double value, const char* what) const {
    if (std::isnan(value)) throw MissingMomentError(std::string("missing moment: ") + what);
    return value;
  }
};

/// Innovation law: density g, CDF G, quantile G^-1, moment table and the
/// moment slack beta0. Sampling is by inverse transform, so a law is fully
/// determined by its quantile function and draws are bit-reproducible.
struct InnovationSpec {
  std::string name;
  double beta0 = 0.5;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  MomentsTable moments;
  double support_lo = -kInf;
  double support_hi = kInf;

  double sample(RngStream& rng) const { return quantile(rng.next_unit()); }
};

// ------------------------------------------------------------- built-in laws

inline InnovationSpec standard_normal(double beta0 = 0.5) {
  InnovationSpec s;
  s.name = "standard-normal";
  s.beta0 = beta0;
  s.density = [](double x) { return normal_pdf(x); };
  s.cdf = [](double x) { return normal_cdf(x); };
  s.quantile = [](double u) { return normal_quantile(u); };
  // E|eps|^r = 2^{r/2} Gamma((r+1)/2) / sqrt(pi)
  auto abs_mom = [](double r) {
    return std::exp(0.5 * r * std::log(2.0) + std::lgamma(0.5 * (r + 1.0)) -
                    0.5 * std::log(M_PI));
  };
  s.moments.abs_mean = abs_mom(1.0);
  s.moments.second = 1.0;
  s.moments.fourth = 3.0;
  s.moments.high_order = abs_mom(8.0 + beta0);
  return s;
}

inline InnovationSpec student_t(double nu, double beta0 = 0.5) {
  InnovationSpec s;
  s.name = "student-t(" + std::to_string(nu) + ")";
  s.beta0 = beta0;
  s.density = [nu](double x) { return student_t_pdf(x, nu); };
  s.cdf = [nu](double x) { return student_t_cdf(x, nu); };
  s.quantile = [nu](double u) { return student_t_quantile(u, nu); };
  // E|T|^r = nu^{r/2} Gamma((r+1)/2) Gamma((nu-r)/2) / (sqrt(pi) Gamma(nu/2)),
  // finite only for r < nu.
  auto abs_mom = [nu](double r) {
    if (r >= nu) return kInf;
    return std::exp(0.5 * r * std::log(nu) + std::lgamma(0.5 * (r + 1.0)) +
                    std::lgamma(0.5 * (nu - r)) - 0.5 * std::log(M_PI) -
                    std::lgamma(0.5 * nu));
  };
  s.moments.abs_mean = abs_mom(1.0);
  s.moments.second = abs_mom(2.0);
  s.moments.fourth = abs_mom(4.0);
  s.moments.high_order = abs_mom(8.0 + beta0);
  return s;
}

inline InnovationSpec uniform_symmetric(double half_width = 1.0, double beta0 = 0.5) {
  InnovationSpec s;
  const double c = half_width;
  s.name = "uniform-symmetric(" + std::to_string(c) + ")";
  s.beta0 = beta0;
  s.support_lo = -c;
  s.support_hi = c;
  s.density = [c](double x) { return std::fabs(x) <= c ? 0.5 / c : 0.0; };
  s.cdf = [c](double x) {
    if (x <= -c) return 0.0;
    if (x >= c) return 1.0;
    return 0.5 * (x / c + 1.0);
  };
  s.quantile = [c](double u) { return c * (2.0 * u - 1.0); };
  auto abs_mom = [c](double r) { return std::pow(c, r) / (r + 1.0); };
  s.moments.abs_mean = abs_mom(1.0);
  s.moments.second = abs_mom(2.0);
  s.moments.fourth = abs_mom(4.0);
  s.moments.high_order = abs_mom(8.0 + beta0);
  return s;
}

/// Law given by density values on a knot grid (piecewise linear between
/// knots, zero outside). The density is renormalized to integrate to 1; the
/// CDF is the exact integral of the interpolant and the quantile inverts it
/// segment by segment. Moments must be supplied by the caller.
inline InnovationSpec user_tabulated(std::string name, std::vector<double> xs,
                                     std::vector<double> gs, MomentsTable moments,
                                     double beta0 = 0.5) {
  if (xs.size() != gs.size() || xs.size() < 2)
    throw ConfigError("user-tabulated law needs matching x/density tables of size >= 2");
  // Cumulative trapezoid masses, then normalize.
  std::vector<double> cum(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] <= xs[i - 1]) throw ConfigError("user-tabulated knots must increase");
    cum[i] = cum[i - 1] + 0.5 * (gs[i] + gs[i - 1]) * (xs[i] - xs[i - 1]);
  }
  double total = cum.back();
  if (!(total > 0)) throw ConfigError("user-tabulated density has zero mass");
  for (auto& g : gs) g /= total;
  for (auto& cm : cum) cm /= total;

  InnovationSpec s;
  s.name = std::move(name);
  s.beta0 = beta0;
  s.moments = moments;
  s.support_lo = xs.front();
  s.support_hi = xs.back();
  auto seg = [xs](double x) {
    std::size_t i =
        std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    return std::min(std::max<std::size_t>(i, 1), xs.size() - 1) - 1;
  };
  s.density = [xs, gs, seg](double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    std::size_t i = seg(x);
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return gs[i] + t * (gs[i + 1] - gs[i]);
  };
  s.cdf = [xs, gs, cum, seg](double x) {
    if (x <= xs.front()) return 0.0;
    if (x >= xs.back()) return 1.0;
    std::size_t i = seg(x);
    double h = x - xs[i];
    double slope = (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i]);
    return cum[i] + gs[i] * h + 0.5 * slope * h * h;
  };
  s.quantile = [xs, gs, cum](double u) {
    if (u <= 0.0) return xs.front();
    if (u >= 1.0) return xs.back();
    std::size_t i =
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
    i = std::min(std::max<std::size_t>(i, 1), cum.size() - 1) - 1;
    double du = u - cum[i];
    double slope = (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i]);
    if (std::fabs(slope) < 1e-300) return xs[i] + du / gs[i];
    // Solve g_i h + slope h^2 / 2 = du for h in the segment.
    double disc = gs[i] * gs[i] + 2.0 * slope * du;
    double h = (-gs[i] + std::sqrt(std::max(disc, 0.0))) / slope;
    return xs[i] + h;
  };
  return s;
}

// ------------------------------------------------------------------ sampling

inline std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n,
                                              RngStream& rng) {
  std::vector<double> out(n);
  for (auto& x : out) x = spec.sample(rng);
  return out;
}

inline std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n,
                                              std::uint64_t seed) {
  RngStream rng(seed);
  return sample_innovations(spec, n, rng);
}

// ----------------------------------------------------------- condition check

/// Witnesses for the stationarity, density-regularity and moment conditions.
struct ConditionReport {
  bool zero_mean = false;
  bool stationary = false;         // E eps^2 * sup ||a||_1 < 1
  double stationarity_product = kNaN;
  bool density_positive = false;   // g > 0 on the scan grid
  bool deriv_weighted_finite = false;  // sup (1+x^2)|g'(x)| finite on the grid
  double deriv_weighted_sup = kNaN;
  bool tail_ok = false;            // |x g(x)| < 1e-4 at the grid endpoints
  bool high_moment_finite = false; // E|eps|^{8+beta0} < inf
  double high_moment = kNaN;

  bool condition1() const { return zero_mean && stationary; }
  bool condition3() const { return density_positive && deriv_weighted_finite && tail_ok; }
  bool condition5() const { return high_moment_finite; }
  bool all_ok() const { return condition1() && condition3() && condition5(); }
};

/// Finite verification of the moment/density conditions: the limit statements
/// are replaced by a scan over [G^-1(1e-6), G^-1(1-1e-6)] with 1e4 points and
/// an |x g(x)| < 1e-4 endpoint test.
inline ConditionReport check_conditions(const InnovationSpec& spec, const ParamDomain& domain) {
  ConditionReport r;
  r.zero_mean = std::fabs(spec.moments.mean) <= 1e-6;
  double e2 = spec.moments.require(spec.moments.second, "E eps^2");
  r.stationarity_product = e2 * domain.sup_l1();
  r.stationary = r.stationarity_product < 1.0;

  const int npts = 10000;
  double lo = spec.quantile(1e-6), hi = spec.quantile(1.0 - 1e-6);
  double h = (hi - lo) / (npts - 1);
  r.density_positive = true;
  double sup_wd = 0.0;
  double prev = spec.density(lo);
  double cur = spec.density(lo + h);
  for (int i = 1; i + 1 < npts; ++i) {
    double x = lo + i * h;
    double next = spec.density(x + h);
    if (!(cur > 0.0)) r.density_positive = false;
    double deriv = (next - prev) / (2.0 * h);
    sup_wd = std::max(sup_wd, (1.0 + x * x) * std::fabs(deriv));
    prev = cur;
    cur = next;
  }
  r.deriv_weighted_sup = sup_wd;
  r.deriv_weighted_finite = std::isfinite(sup_wd);
  r.tail_ok = std::fabs(lo * spec.density(lo)) < 1e-4 &&
              std::fabs(hi * spec.density(hi)) < 1e-4;

  r.high_moment = spec.moments.require(spec.moments.high_order, "E|eps|^{8+beta0}");
  r.high_moment_finite = std::isfinite(r.high_moment);
  return r;
}

}  // namespace arep
