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
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "arep/arch_model.hpp"
#include "arep/errors.hpp"
#include "arep/innovations.hpp"
#include "arep/params.hpp"
#include "arep/stats.hpp"

namespace arep {

namespace detail {

/// Joint histogram over (future block, past window) quantile bins with
/// rectangle-sum queries via an inclusive prefix tensor.
struct BinTensor {
  int dims = 0;
  int bins = 0;
  std::vector<long> strides;
  std::vector<double> prefix;  // inclusive prefix sums of counts
  double total = 0.0;

  double corner(std::span<const int> idx) const {
    // prefix at idx (any coordinate -1 means empty).
    long off = 0;
    for (int d = 0; d < dims; ++d) {
      if (idx[d] < 0) return 0.0;
      off += strides[d] * idx[d];
    }
    return prefix[static_cast<std::size_t>(off)];
  }

  /// Sum of counts over the box [lo_d, hi_d] per dimension.
  double box_sum(std::span<const int> lo, std::span<const int> hi) const {
    double acc = 0.0;
    std::vector<int> corner_idx(dims);
    for (unsigned mask = 0; mask < (1u << dims); ++mask) {
      int sign = 1;
      for (int d = 0; d < dims; ++d) {
        if (mask & (1u << d)) {
          corner_idx[d] = lo[d] - 1;
          sign = -sign;
        } else {
          corner_idx[d] = hi[d];
        }
      }
      acc += sign * corner(corner_idx);
    }
    return acc;
  }
};

inline BinTensor build_bin_tensor(const std::vector<std::vector<int>>& coords, int dims,
                                  int bins) {
  BinTensor t;
  t.dims = dims;
  t.bins = bins;
  t.strides.resize(dims);
  long size = 1;
  for (int d = dims - 1; d >= 0; --d) {
    t.strides[d] = size;
    size *= bins;
  }
  t.prefix.assign(static_cast<std::size_t>(size), 0.0);
  for (const auto& c : coords) {
    long off = 0;
    for (int d = 0; d < dims; ++d) off += t.strides[d] * c[d];
    t.prefix[static_cast<std::size_t>(off)] += 1.0;
    t.total += 1.0;
  }
  // In-place prefix along each axis.
  for (int d = 0; d < dims; ++d) {
    for (long off = 0; off < size; ++off) {
      long coord = (off / t.strides[d]) % bins;
      if (coord > 0)
        t.prefix[static_cast<std::size_t>(off)] +=
            t.prefix[static_cast<std::size_t>(off - t.strides[d])];
    }
  }
  return t;
}

/// All bin intervals [lo, hi] of one coordinate, as pairs.
inline std::vector<std::pair<int, int>> bin_intervals(int bins) {
  std::vector<std::pair<int, int>> out;
  for (int lo = 0; lo < bins; ++lo)
    for (int hi = lo; hi < bins; ++hi) out.emplace_back(lo, hi);
  return out;
}

/// Cartesian product of per-coordinate intervals into joint boxes.
inline std::vector<std::vector<std::pair<int, int>>> interval_boxes(int dims, int bins) {
  auto ivs = bin_intervals(bins);
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::size_t> idx(dims, 0);
  for (;;) {
    std::vector<std::pair<int, int>> box(dims);
    for (int d = 0; d < dims; ++d) box[d] = ivs[idx[d]];
    out.push_back(std::move(box));
    int d = 0;
    while (d < dims && ++idx[d] == ivs.size()) idx[d++] = 0;
    if (d == dims) break;
  }
  return out;
}

}  // namespace detail

/// Plug-in strong-mixing estimate between the future block
/// (y_{t+k},...,y_{t+k+block_p-1}) and the past window (y_t,...,y_{t-m+1}):
/// the max of |P(A n B) - P(A) P(B)| over rectangles whose per-coordinate
/// intervals join marginal quantile-bin edges. Probabilities are time
/// averages; the family is nested across dyadic bin counts, so refining the
/// bins never decreases the estimate. A lower bound for the true coefficient.
inline double empirical_alpha(const Path& path, int k, int block_p, int m, int bins) {
  if (bins < 2) throw ConfigError("empirical_alpha needs bins >= 2");
  const long n = path.n();
  const int p = path.p;
  const long t_lo = m - p;  // past window reaches back to time 1-p
  const long t_hi = n - k - block_p + 1;
  const long count = t_hi - t_lo + 1;
  if (count < 100) throw PathTooShortError("empirical_alpha: fewer than 100 usable windows");

  // Marginal quantile edges from the whole realized path.
  std::vector<double> sorted(path.values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int i = 1; i < bins; ++i) {
    std::size_t pos = static_cast<std::size_t>(
        std::floor(static_cast<double>(i) / bins * static_cast<double>(sorted.size())));
    edges.push_back(sorted[std::min(pos, sorted.size() - 1)]);
  }
  auto bin_of = [&](double v) {
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
  };

  const int dims = block_p + m;
  std::vector<std::vector<int>> coords;
  coords.reserve(static_cast<std::size_t>(count));
  std::vector<int> c(dims);
  for (long t = t_lo; t <= t_hi; ++t) {
    for (int j = 0; j < block_p; ++j) c[j] = bin_of(path.y(t + k + j));
    for (int j = 0; j < m; ++j) c[block_p + j] = bin_of(path.y(t - j));
    coords.push_back(c);
  }
  auto tensor = detail::build_bin_tensor(coords, dims, bins);

  auto fut_boxes = detail::interval_boxes(block_p, bins);
  auto past_boxes = detail::interval_boxes(m, bins);
  std::vector<int> lo(dims), hi(dims);
  const double inv_n = 1.0 / tensor.total;

  // Marginal probabilities with the complementary dimensions left full.
  auto marginal = [&](const std::vector<std::pair<int, int>>& box, bool future) {
    for (int d = 0; d < dims; ++d) {
      lo[d] = 0;
      hi[d] = bins - 1;
    }
    int base = future ? 0 : block_p;
    for (std::size_t d = 0; d < box.size(); ++d) {
      lo[base + d] = box[d].first;
      hi[base + d] = box[d].second;
    }
    return tensor.box_sum(lo, hi) * inv_n;
  };
  std::vector<double> pa(fut_boxes.size()), pb(past_boxes.size());
  for (std::size_t i = 0; i < fut_boxes.size(); ++i) pa[i] = marginal(fut_boxes[i], true);
  for (std::size_t j = 0; j < past_boxes.size(); ++j) pb[j] = marginal(past_boxes[j], false);

  double alpha = 0.0;
  for (std::size_t i = 0; i < fut_boxes.size(); ++i) {
    for (std::size_t j = 0; j < past_boxes.size(); ++j) {
      for (int d = 0; d < block_p; ++d) {
        lo[d] = fut_boxes[i][d].first;
        hi[d] = fut_boxes[i][d].second;
      }
      for (int d = 0; d < m; ++d) {
        lo[block_p + d] = past_boxes[j][d].first;
        hi[block_p + d] = past_boxes[j][d].second;
      }
      double pab = tensor.box_sum(lo, hi) * inv_n;
      alpha = std::max(alpha, std::fabs(pab - pa[i] * pb[j]));
    }
  }
  return alpha;
}

/// Decay profile of the mixing estimate with a geometric fit. `gamma` is
/// +inf (with all_below_floor set) when no lag clears the noise floor
/// 3 (path_len / (k+m))^{-1/2} — the iid regime.
struct MixingReport {
  std::vector<int> ks;
  std::vector<double> alpha_hat;
  std::vector<double> alpha_se;
  std::vector<double> noise_floor;
  double C = 0.0;
  double gamma = kInf;
  double r2 = 1.0;
  bool all_below_floor = false;
  long path_len = 0;
  int reps = 0, bins = 0, m = 0, block_p = 0;
};

inline MixingReport mixing_decay_report(const ArchParams& params, const InnovationSpec& spec,
                                        std::span<const int> ks, long path_len, int reps,
                                        int bins, int m, std::uint64_t seed) {
  if (ks.empty()) throw ConfigError("mixing_decay_report needs at least one lag");
  MixingReport rep;
  rep.ks.assign(ks.begin(), ks.end());
  rep.path_len = path_len;
  rep.reps = reps;
  rep.bins = bins;
  rep.m = m;
  rep.block_p = params.p();
  RngStream root(seed);
  std::vector<std::vector<double>> per_k(ks.size());
  for (int r = 0; r < reps; ++r) {
    Path path = simulate_path(params, spec, path_len,
                              root.child(static_cast<std::uint64_t>(r)).next_u64());
    for (std::size_t i = 0; i < ks.size(); ++i)
      per_k[i].push_back(empirical_alpha(path, ks[i], params.p(), m, bins));
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    rep.alpha_hat.push_back(mean_of(per_k[i]));
    rep.alpha_se.push_back(std::sqrt(variance_of(per_k[i]) / reps));
    rep.noise_floor.push_back(3.0 / std::sqrt(static_cast<double>(path_len) / (ks[i] + m)));
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (rep.alpha_hat[i] > rep.noise_floor[i]) {
      xs.push_back(ks[i]);
      ys.push_back(std::log(rep.alpha_hat[i]));
    }
  if (xs.size() < 2) {
    rep.all_below_floor = true;
    return rep;
  }
  LinearFit fit = fit_linear(xs, ys);
  rep.C = std::exp(fit.intercept);
  rep.gamma = -fit.slope;
  rep.r2 = fit.r2;
  return rep;
}

// ------------------------------------------------- depth-k variance expansion

/// sigma^2 after k recursion levels as a function of the lag window z that
/// stands k steps back: exactly affine in (z_1^2,...,z_p^2) with random
/// coefficients driven by eps_{t-1},...,eps_{t-k+1} (`eps_recent`, most
/// recent first).
inline double sigma2_depth(const ArchParams& params, std::span<const double> eps_recent,
                           int k, std::span<const double> z) {
  const int p = params.p();
  if (static_cast<int>(eps_recent.size()) < k - 1)
    throw HistoryTooShortError("sigma2_depth needs k-1 innovations");
  // Buffer of y^2 over times t-k-p+1 .. t-1.
  std::vector<double> y2(static_cast<std::size_t>(k - 1 + p), 0.0);
  for (int i = 0; i < p; ++i) y2[i] = z[p - i - 1] * z[p - i - 1];
  for (int s = 1; s <= k - 1; ++s) {
    // time t-k+s has buffer index p-1+s and innovation eps_{t-(k-s)}
    double e = eps_recent[static_cast<std::size_t>(k - 1 - s)];
    double acc = 1.0;
    for (int j = 1; j <= p; ++j) acc += params.a[j - 1] * y2[static_cast<std::size_t>(p - 1 + s - j)];
    y2[static_cast<std::size_t>(p - 1 + s)] = e * e * acc;
  }
  double s2 = 1.0;
  for (int j = 1; j <= p; ++j) s2 += params.a[j - 1] * y2[static_cast<std::size_t>(k + p - 1 - j)];
  return s2;
}

/// Monte-Carlo means of the expansion coefficients M^0..M^p at depth k,
/// extracted exactly from sigma2_depth at z = 0 and at unit vectors (the
/// affine structure makes the differences exact).
inline std::vector<double> mj_moment_estimate(const ArchParams& params,
                                              const InnovationSpec& spec, int k, long reps,
                                              std::uint64_t seed) {
  const int p = params.p();
  RngStream root(seed);
  std::vector<double> acc(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> z(p, 0.0);
  for (long r = 0; r < reps; ++r) {
    RngStream rng = root.child(static_cast<std::uint64_t>(r));
    auto eps = sample_innovations(spec, static_cast<std::size_t>(std::max(k - 1, 0)), rng);
    double m0 = sigma2_depth(params, eps, k, z);
    acc[0] += m0;
    for (int j = 0; j < p; ++j) {
      z[j] = 1.0;
      acc[static_cast<std::size_t>(j) + 1] += sigma2_depth(params, eps, k, z) - m0;
      z[j] = 0.0;
    }
  }
  for (auto& v : acc) v /= static_cast<double>(reps);
  return acc;
}

// --------------------------------------------------- product-density oracle

/// Quadrature density of the stationary observation for p = 1:
/// f(x) = ∫ z^{-1} g(x/z) dF_sigma(z) with F_sigma the empirical law of
/// sigma = sqrt(1 + a_1 y^2) over a simulated stationary sample.
class ProductDensityOracle {
 public:
  ProductDensityOracle(const ArchParams& params, const InnovationSpec& spec, long quad_points,
                       std::uint64_t seed)
      : density_(spec.density) {
    if (params.p() != 1) throw ConfigError("product density oracle supports p = 1");
    Path path = simulate_path(params, spec, quad_points, seed);
    sigmas_.reserve(static_cast<std::size_t>(quad_points));
    for (long t = 1; t <= quad_points; ++t)
      sigmas_.push_back(std::sqrt(1.0 + params.a[0] * path.y(t) * path.y(t)));
  }

  double density(double x) const {
    double acc = 0.0;
    for (double s : sigmas_) acc += density_(x / s) / s;
    return acc / static_cast<double>(sigmas_.size());
  }

 private:
  std::function<double(double)> density_;
  std::vector<double> sigmas_;
};

// --------------------------------------- ergodic-average and sup statistics

using WindowFn = std::function<double(std::span<const double>)>;

/// Time average of f over lag windows (law-of-large-numbers probe).
inline double time_average(const Path& path, const WindowFn& f) {
  const long n = path.n();
  std::vector<double> window(path.p);
  double acc = 0.0;
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, path.p, window);
    acc += f(window);
  }
  return acc / static_cast<double>(n);
}

/// sup_x |n^{-1/2} sum_t [f(Y_{t-1}) I{eps_t <= x} - G(x) E f]| over the true
/// innovations; exact over x because the first term is a step function and
/// the drift is monotone between its jumps. `ef` is an externally estimated
/// E f(Y_0).
inline double corollary7_sup_statistic(const Path& path, const WindowFn& f, double ef,
                                       const InnovationSpec& spec) {
  const long n = path.n();
  if (path.innovations.empty())
    throw ConfigError("corollary7_sup_statistic needs stored innovations");
  std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(n));
  std::vector<double> window(path.p);
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, path.p, window);
    pairs[t - 1] = {path.eps(t), f(window)};
  }
  std::sort(pairs.begin(), pairs.end());
  double sup = 0.0, prefix = 0.0;
  const double scale = static_cast<double>(n) * ef;
  for (long i = 0; i <= n; ++i) {
    double g_lo = i == 0 ? 0.0 : spec.cdf(pairs[i - 1].first);
    double g_hi = i == static_cast<long>(n) ? 1.0 : spec.cdf(pairs[i].first);
    sup = std::max(sup, std::fabs(prefix - scale * g_lo));
    sup = std::max(sup, std::fabs(prefix - scale * g_hi));
    if (i < n) prefix += pairs[i].second;
  }
  return sup / std::sqrt(static_cast<double>(n));
}

}  // namespace arep
