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
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "arep/arch_model.hpp"
#include "arep/errors.hpp"
#include "arep/innovations.hpp"
#include "arep/mixing_lab.hpp"
#include "arep/rng.hpp"
#include "arep/stats.hpp"

namespace arep {

/// M_n = max_{0<=i<=n} min(|S_i|, |S_n - S_i|) over partial sums with S_0=0.
inline double mn_statistic(std::span<const double> partial_sums) {
  if (partial_sums.empty() || partial_sums.front() != 0.0)
    throw ConfigError("mn_statistic expects partial sums starting at S_0 = 0");
  const double sn = partial_sums.back();
  double m = 0.0;
  for (double s : partial_sums) m = std::max(m, std::min(std::fabs(s), std::fabs(sn - s)));
  return m;
}

/// K_alpha = (2^{-1/4} - 2^{-alpha/4})^{-4}, the explicit constant of the
/// fourth-moment maximal inequality; diverges as alpha -> 1+.
inline double k_alpha(double alpha) {
  if (alpha <= 1.0) throw AlphaAtOrBelowOneError("k_alpha requires alpha > 1");
  double d = std::pow(2.0, -0.25) - std::pow(2.0, -alpha / 4.0);
  return 1.0 / (d * d * d * d);
}

// -------------------------------------------------------------- increment law

/// iid increments with known second and fourth moments, so the inequality
/// hypothesis E (sum of m)^4 <= (sum of u)^alpha can be checked analytically.
/// Rademacher is enumerable, which gives an exact oracle at small n.
struct IncrementLaw {
  enum class Kind { rademacher, gaussian };
  Kind kind = Kind::rademacher;
  double scale = 1.0;
  std::string name = "rademacher";

  static IncrementLaw rademacher(double c = 1.0) {
    return {Kind::rademacher, c, "rademacher(" + std::to_string(c) + ")"};
  }
  static IncrementLaw gaussian(double c = 1.0) {
    return {Kind::gaussian, c, "gaussian(" + std::to_string(c) + ")"};
  }

  double sigma2() const { return scale * scale; }
  double kappa4() const {
    double c4 = scale * scale * scale * scale;
    return kind == Kind::rademacher ? c4 : 3.0 * c4;
  }
  /// E (eta_1 + ... + eta_m)^4 for iid mean-zero increments.
  double sum4_moment(long mcount) const {
    double md = static_cast<double>(mcount);
    return md * kappa4() + 3.0 * md * (md - 1.0) * sigma2() * sigma2();
  }
  bool enumerable() const { return kind == Kind::rademacher; }

  void sample(RngStream& rng, std::span<double> out) const {
    if (kind == Kind::rademacher) {
      rng.fill_signs(out);
      for (auto& v : out) v *= scale;
    } else {
      for (auto& v : out) v = scale * normal_quantile(rng.next_unit());
    }
  }
};

/// Smallest constant weight u such that E (sum of m increments)^4 <= (u m)^alpha
/// for every m <= n (the hypothesis is tight at m = n).
inline double calibrate_uniform_u(const IncrementLaw& law, long n, double alpha) {
  double worst = 0.0;
  for (long m = 1; m <= n; ++m)
    worst = std::max(worst, std::pow(law.sum4_moment(m), 1.0 / alpha) / static_cast<double>(m));
  return worst;
}

// ------------------------------------------------------------------- reports

/// Monte-Carlo (or exact) estimate of a statistic against a theoretical
/// bound. PASS demands bound >= estimate + 3 se; margin records the ratio.
struct IneqReport {
  std::string statistic_name;
  double mc_estimate = 0.0;
  double mc_se = 0.0;
  double bound_value = 0.0;
  double margin = kInf;
  long reps = 0;
  bool exact = false;
  bool passed = false;
  std::string config;

  void finalize() {
    passed = bound_value >= mc_estimate + 3.0 * mc_se;
    margin = mc_estimate > 0.0 ? bound_value / mc_estimate : kInf;
  }
};

namespace detail {

inline void check_m4_hypothesis(const IncrementLaw& law, std::span<const double> u, long n,
                                double alpha) {
  // For iid increments the fourth moment of a block depends only on its
  // length; the binding window sum is the smallest one of that length.
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (long i = 0; i < n; ++i) {
    if (u[i] < 0.0) throw HypothesisViolatedError("weights u_i must be nonnegative");
    prefix[i + 1] = prefix[i] + u[i];
  }
  for (long m = 1; m <= n; ++m) {
    double min_window = kInf;
    for (long i = 0; i + m <= n; ++i)
      min_window = std::min(min_window, prefix[i + m] - prefix[i]);
    if (law.sum4_moment(m) > std::pow(min_window, alpha) * (1.0 + 1e-12))
      throw HypothesisViolatedError("E (block sum)^4 exceeds (sum u)^alpha at length " +
                                    std::to_string(m));
  }
}

template <typename StatFn>
IneqReport verify_partial_sum_bound(const IncrementLaw& law, std::span<const double> u, long n,
                                    double alpha, long reps, std::uint64_t seed, bool exact,
                                    double bound, const char* name, StatFn&& statistic) {
  check_m4_hypothesis(law, u, n, alpha);
  IneqReport rep;
  rep.statistic_name = name;
  rep.bound_value = bound;
  std::vector<double> incr(static_cast<std::size_t>(n));
  std::vector<double> sums(static_cast<std::size_t>(n) + 1, 0.0);
  if (exact) {
    if (!law.enumerable()) throw ConfigError("exact enumeration needs an enumerable law");
    if (n > 20) throw ConfigError("exact enumeration supports n <= 20");
    rep.exact = true;
    rep.reps = 1L << n;
    double acc = 0.0;
    for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
      for (long i = 0; i < n; ++i)
        sums[i + 1] = sums[i] + ((bits >> i) & 1u ? law.scale : -law.scale);
      double v = statistic(sums);
      acc += v * v * v * v;
    }
    rep.mc_estimate = acc / static_cast<double>(1ull << n);
    rep.mc_se = 0.0;
  } else {
    rep.reps = reps;
    RngStream root(seed);
    double s1 = 0.0, s2 = 0.0;
    for (long r = 0; r < reps; ++r) {
      RngStream rng = root.child(static_cast<std::uint64_t>(r));
      law.sample(rng, incr);
      for (long i = 0; i < n; ++i) sums[i + 1] = sums[i] + incr[i];
      double v = statistic(sums);
      double v4 = v * v * v * v;
      s1 += v4;
      s2 += v4 * v4;
    }
    rep.mc_estimate = s1 / static_cast<double>(reps);
    double var = s2 / static_cast<double>(reps) - rep.mc_estimate * rep.mc_estimate;
    rep.mc_se = std::sqrt(std::max(var, 0.0) / static_cast<double>(reps));
  }
  rep.finalize();
  return rep;
}

}  // namespace detail

/// E M_n^4 against K_alpha (u_1+...+u_n)^alpha. Throws HypothesisViolated if
/// the supplied weights do not dominate the block fourth moments.
inline IneqReport verify_m4_lemma(const IncrementLaw& law, std::span<const double> u, long n,
                                  double alpha, long reps, std::uint64_t seed,
                                  bool exact = false) {
  double total_u = 0.0;
  for (double v : u) total_u += v;
  double bound = k_alpha(alpha) * std::pow(total_u, alpha);
  return detail::verify_partial_sum_bound(
      law, u, n, alpha, reps, seed, exact, bound, "E M_n^4",
      [](std::span<const double> sums) { return mn_statistic(sums); });
}

/// E max_i S_i^4 against 2^{alpha-1} K_alpha (u_1+...+u_n)^alpha.
inline IneqReport verify_s4_corollary(const IncrementLaw& law, std::span<const double> u,
                                      long n, double alpha, long reps, std::uint64_t seed,
                                      bool exact = false) {
  double total_u = 0.0;
  for (double v : u) total_u += v;
  double bound = std::pow(2.0, alpha - 1.0) * k_alpha(alpha) * std::pow(total_u, alpha);
  return detail::verify_partial_sum_bound(
      law, u, n, alpha, reps, seed, exact, bound, "E max S_i^4",
      [](std::span<const double> sums) {
        double m = 0.0;
        for (double s : sums) m = std::max(m, std::fabs(s));
        return m;
      });
}

/// Rosenthal-type gate: the fourth moment of the martingale normalized sum
/// n^{-1/2} sum f(Y_{t-1})[I{eps_t<=x} - G(x)] against 8 E f^4(Y_0).
inline IneqReport verify_rosenthal(const ArchParams& params, const InnovationSpec& spec,
                                   const WindowFn& f, const std::string& f_name, double x,
                                   long n, long reps, std::uint64_t seed) {
  IneqReport rep;
  rep.statistic_name = "E S_n(x)^4 [f=" + f_name + "]";
  rep.reps = reps;
  RngStream root(seed);
  const double gx = spec.cdf(x);
  double s1 = 0.0, s2 = 0.0, f4 = 0.0;
  long f4_count = 0;
  std::vector<double> window(params.p());
  for (long r = 0; r < reps; ++r) {
    Path path = simulate_path(params, spec, n,
                              root.child(static_cast<std::uint64_t>(r)).next_u64());
    double acc = 0.0;
    for (long t = 1; t <= n; ++t) {
      path.lag_window(t - 1, params.p(), window);
      double fv = f(window);
      acc += fv * ((path.eps(t) <= x ? 1.0 : 0.0) - gx);
      if (t <= 32) {  // thinned stationary sample for E f^4
        f4 += fv * fv * fv * fv;
        ++f4_count;
      }
    }
    double s = acc / std::sqrt(static_cast<double>(n));
    double v4 = s * s * s * s;
    s1 += v4;
    s2 += v4 * v4;
  }
  rep.mc_estimate = s1 / static_cast<double>(reps);
  double var = s2 / static_cast<double>(reps) - rep.mc_estimate * rep.mc_estimate;
  rep.mc_se = std::sqrt(std::max(var, 0.0) / static_cast<double>(reps));
  rep.bound_value = 8.0 * f4 / static_cast<double>(f4_count);
  rep.finalize();
  return rep;
}

// ----------------------------------------------- partitioned sup-norm bound

struct PartitionReport {
  IneqReport ineq;
  int bins_used = 0;
  double n_ratio_realized = 0.0;
  double l_constant = 0.0;
  double r_tau = 0.0;
};

/// Partitioned empirical-process sup bound: f is split over |f|-magnitude
/// bins B_j, S_n(z) = sum_j n^{-1/2} sum_t f_j(Y_{t-1})[I{eps_t<=z_j}-G(z_j)],
/// and E sup_z |S_n(z)| is compared against
///   (8 sqrt(2) K_{3/2})^{1/4} R + n^{(d-2)/4} 3 N^d L R^d,
/// with R = sum_j (E f_j^4)^{1/4}. Bins are geometric in |f| over the
/// realized range; the run fails if their realized sup/inf ratio exceeds the
/// supplied N. L is the smallest constant valid for the realized bins with
/// the supplied d. The sup over thresholds is exact: per bin the process is
/// a step function evaluated at both ends of every innovation gap.
inline PartitionReport verify_partition_sup_bound(const ArchParams& params,
                                                  const InnovationSpec& spec, const WindowFn& f,
                                                  const std::string& f_name, int bins, long n,
                                                  double d, double n_ratio, long reps,
                                                  std::uint64_t seed, long calib_len = 100000) {
  if (d < 1.0 || d >= 2.0) throw ConfigError("partition bound needs 1 <= d < 2");
  const int p = params.p();
  RngStream root(seed);

  // Calibration sample for bin edges, E f_j^4 and the condition-ii scan.
  Path calib = simulate_path(params, spec, calib_len, root.child(0xCA11B).next_u64());
  std::vector<double> window(p);
  std::vector<double> fabs_vals(static_cast<std::size_t>(calib_len));
  for (long t = 1; t <= calib_len; ++t) {
    calib.lag_window(t - 1, p, window);
    fabs_vals[t - 1] = std::fabs(f(window));
  }
  double vmax = *std::max_element(fabs_vals.begin(), fabs_vals.end());
  double vmin = kInf;
  for (double v : fabs_vals)
    if (v > 0.0) vmin = std::min(vmin, v);
  if (!(vmax > 0.0)) {
    // f == 0: nothing to bound, report trivially.
    PartitionReport rep;
    rep.ineq.statistic_name = "E sup_z |S_n(z)| [f=" + f_name + "]";
    rep.ineq.reps = reps;
    rep.ineq.finalize();
    return rep;
  }

  std::vector<double> edges;  // bin j covers [edges[j], edges[j+1])
  if (vmin >= vmax) {
    edges = {vmin * 0.5, vmax * 2.0};
    bins = 1;
  } else {
    double ratio = std::pow(vmax / vmin, 1.0 / bins);
    edges.push_back(vmin * (1.0 - 1e-12));
    for (int j = 1; j < bins; ++j) edges.push_back(vmin * std::pow(ratio, j));
    edges.push_back(vmax * (1.0 + 1e-12));
  }
  auto bin_of = [&](double av) {
    if (av < edges.front() || av > edges.back()) return -1;  // |f| = 0 or out of range
    int j = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), av) -
                             edges.begin()) - 1;
    return std::min(j, bins - 1);
  };

  // Realized per-bin sup/inf and fourth moments.
  std::vector<double> sup_j(bins, 0.0), inf_j(bins, kInf), f4_j(bins, 0.0);
  std::vector<long> count_j(bins, 0);
  for (double av : fabs_vals) {
    int j = bin_of(av);
    if (j < 0) continue;
    sup_j[j] = std::max(sup_j[j], av);
    inf_j[j] = std::min(inf_j[j], av);
    f4_j[j] += av * av * av * av;
    ++count_j[j];
  }
  PartitionReport rep;
  rep.bins_used = bins;
  double r_tau = 0.0;
  for (int j = 0; j < bins; ++j) {
    if (count_j[j] == 0) continue;
    rep.n_ratio_realized = std::max(rep.n_ratio_realized, sup_j[j] / inf_j[j]);
    r_tau += std::pow(f4_j[j] / static_cast<double>(calib_len), 0.25);
  }
  if (rep.n_ratio_realized > n_ratio * (1.0 + 1e-9))
    throw PartitionConditionFailedError("realized sup/inf ratio exceeds supplied N");
  // Minimal L with sum_{sup_j <= v} sup_j <= L v^d over realized sups.
  std::vector<double> sups_sorted;
  for (int j = 0; j < bins; ++j)
    if (count_j[j] > 0) sups_sorted.push_back(sup_j[j]);
  std::sort(sups_sorted.begin(), sups_sorted.end());
  double run = 0.0, l_const = 0.0;
  for (double v : sups_sorted) {
    run += v;
    l_const = std::max(l_const, run / std::pow(v, d));
  }
  rep.l_constant = l_const;
  rep.r_tau = r_tau;

  // Monte Carlo of the exact sup over thresholds.
  IneqReport& ineq = rep.ineq;
  ineq.statistic_name = "E sup_z |S_n(z)| [f=" + f_name + "]";
  ineq.reps = reps;
  double s1 = 0.0, s2 = 0.0;
  std::vector<std::pair<double, std::pair<double, int>>> items(static_cast<std::size_t>(n));
  for (long r = 0; r < reps; ++r) {
    Path path = simulate_path(params, spec, n,
                              root.child(1 + static_cast<std::uint64_t>(r)).next_u64());
    for (long t = 1; t <= n; ++t) {
      path.lag_window(t - 1, p, window);
      double fv = f(window);
      items[t - 1] = {path.eps(t), {fv, bin_of(std::fabs(fv))}};
    }
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> pref(bins, 0.0), tot(bins, 0.0), hi(bins, 0.0), lo(bins, 0.0);
    for (auto& it : items)
      if (it.second.second >= 0) tot[it.second.second] += it.second.first;
    for (long i = 0; i <= n; ++i) {
      double g_lo = i == 0 ? 0.0 : spec.cdf(items[i - 1].first);
      double g_hi = i == static_cast<long>(n) ? 1.0 : spec.cdf(items[i].first);
      for (int j = 0; j < bins; ++j) {
        double a = pref[j] - g_lo * tot[j];
        double b = pref[j] - g_hi * tot[j];
        hi[j] = std::max({hi[j], a, b});
        lo[j] = std::min({lo[j], a, b});
      }
      if (i < n && items[i].second.second >= 0)
        pref[items[i].second.second] += items[i].second.first;
    }
    double sup_plus = 0.0, sup_minus = 0.0;
    for (int j = 0; j < bins; ++j) {
      sup_plus += hi[j];
      sup_minus += lo[j];
    }
    double v = std::max(sup_plus, -sup_minus) / std::sqrt(static_cast<double>(n));
    s1 += v;
    s2 += v * v;
  }
  ineq.mc_estimate = s1 / static_cast<double>(reps);
  double var = s2 / static_cast<double>(reps) - ineq.mc_estimate * ineq.mc_estimate;
  ineq.mc_se = std::sqrt(std::max(var, 0.0) / static_cast<double>(reps));
  ineq.bound_value = std::pow(8.0 * std::sqrt(2.0) * k_alpha(1.5), 0.25) * r_tau +
                     std::pow(static_cast<double>(n), (d - 2.0) / 4.0) * 3.0 *
                         std::pow(n_ratio, d) * l_const * std::pow(r_tau, d);
  ineq.finalize();
  return rep;
}

}  // namespace arep
