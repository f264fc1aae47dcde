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
#include <string>
#include <vector>

#include "arep/arch_model.hpp"
#include "arep/errors.hpp"
#include "arep/innovations.hpp"
#include "arep/params.hpp"
#include "arep/rng.hpp"
#include "arep/stats.hpp"

namespace arep {

// ------------------------------------------------------------ weight function

inline double e_ratio_component(std::span<const double> window, const ArchParams& theta,
                                int k) {
  double s = cond_variance(theta, window);
  return window[k] * window[k] / s;
}

enum class PhiKind { constant, clipped_e, e_ratio, user };

/// Vector weight phi(U, theta) in R^p attached to each lag window. `bound`
/// is sup ||phi||_inf (inf for unbounded kinds); the clipped kind satisfies
/// the bounded-weight hypothesis of the robustness theorem.
struct WeightFn {
  PhiKind kind = PhiKind::constant;
  double param = 1.0;  // constant value, or the clip level
  double bound = kInf;
  std::string name = "constant";
  std::function<void(std::span<const double>, const ArchParams&, std::span<double>)> eval;

  void operator()(std::span<const double> window, const ArchParams& theta,
                  std::span<double> out) const {
    eval(window, theta, out);
  }
};

inline WeightFn constant_phi(double value = 1.0) {
  WeightFn w;
  w.kind = PhiKind::constant;
  w.param = value;
  w.bound = std::fabs(value);
  w.name = "constant";
  w.eval = [value](std::span<const double>, const ArchParams&, std::span<double> out) {
    for (auto& v : out) v = value;
  };
  return w;
}

/// phi_k = min(e_k(U, theta), clip); bounded by `clip` componentwise.
inline WeightFn clipped_e_phi(double clip = 10.0) {
  WeightFn w;
  w.kind = PhiKind::clipped_e;
  w.param = clip;
  w.bound = clip;
  w.name = "clipped-e";
  w.eval = [clip](std::span<const double> window, const ArchParams& theta,
                  std::span<double> out) {
    double s = cond_variance(theta, window);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = std::min(window[k] * window[k] / s, clip);
  };
  return w;
}

/// phi_k = e_k(U, theta) = U_k^2 / s(theta, U); unbounded over Theta (the
/// sup blows up as theta_k -> 0).
inline WeightFn e_ratio_phi() {
  WeightFn w;
  w.kind = PhiKind::e_ratio;
  w.bound = kInf;
  w.name = "e-ratio";
  w.eval = [](std::span<const double> window, const ArchParams& theta,
              std::span<double> out) {
    double s = cond_variance(theta, window);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = window[k] * window[k] / s;
  };
  return w;
}

inline WeightFn user_phi(
    std::string name,
    std::function<void(std::span<const double>, const ArchParams&, std::span<double>)> fn,
    double bound = kInf) {
  WeightFn w;
  w.kind = PhiKind::user;
  w.bound = bound;
  w.name = std::move(name);
  w.eval = std::move(fn);
  return w;
}

// -------------------------------------------------------------- score function

enum class PsiKind { identity, sign, huber, clipped_square, user };

/// Scalar score psi applied to residuals in the GM equation. The odd choices
/// (identity, sign, huber) are scale-blind for mean-zero/symmetric
/// innovations; clipped-square is the bounded even score that identifies the
/// volatility parameters.
struct PsiFn {
  PsiKind kind = PsiKind::identity;
  double param = 0.0;
  std::string name = "identity";
  std::function<double(double)> fn;

  double operator()(double x) const { return fn(x); }

  static PsiFn identity() {
    PsiFn p;
    p.kind = PsiKind::identity;
    p.name = "identity";
    p.fn = [](double x) { return x; };
    return p;
  }
  static PsiFn sign() {
    PsiFn p;
    p.kind = PsiKind::sign;
    p.name = "sign";
    p.fn = [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
    return p;
  }
  static PsiFn huber(double c) {
    PsiFn p;
    p.kind = PsiKind::huber;
    p.param = c;
    p.name = "huber";
    p.fn = [c](double x) { return std::clamp(x, -c, c); };
    return p;
  }
  static PsiFn clipped_square(double c) {
    PsiFn p;
    p.kind = PsiKind::clipped_square;
    p.param = c;
    p.name = "clipped-square";
    p.fn = [c2 = c * c](double x) { return std::min(x * x, c2); };
    return p;
  }
  static PsiFn user(std::string name, std::function<double(double)> fn) {
    PsiFn p;
    p.kind = PsiKind::user;
    p.name = std::move(name);
    p.fn = std::move(fn);
    return p;
  }
};

// ------------------------------------------------------------------- x grid

/// Discretization of the integrating measure F: point masses `weights` at
/// sorted `points`; `probs` caches G(points) under the innovation law.
struct XGrid {
  std::vector<double> points;
  std::vector<double> probs;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

/// Default F: equal masses 1/m at the quantiles G^-1(i/(m+1)), i = 1..m.
inline XGrid quantile_grid(const InnovationSpec& spec, int m = 64) {
  XGrid g;
  g.points.reserve(m);
  for (int i = 1; i <= m; ++i) {
    double u = static_cast<double>(i) / (m + 1);
    g.points.push_back(spec.quantile(u));
    g.probs.push_back(u);
  }
  g.weights.assign(m, 1.0 / m);
  return g;
}

// --------------------------------------------------------------- evaluations

inline std::pair<double, double> volatility(const ArchParams& theta,
                                            std::span<const double> window) {
  double s = cond_variance(theta, window);
  return {s, std::sqrt(s)};
}

inline std::vector<double> residuals(const Path& path, const ArchParams& theta) {
  if (theta.p() > path.p)
    throw OrderMismatchError("trial order exceeds path order");
  const long n = path.n();
  std::vector<double> out(static_cast<std::size_t>(n));
  std::vector<double> window(theta.p());
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, theta.p(), window);
    out[t - 1] = path.y(t) / std::sqrt(cond_variance(theta, window));
  }
  return out;
}

inline double residual_ecdf(const Path& path, const ArchParams& theta, double x) {
  auto res = residuals(path, theta);
  long cnt = 0;
  for (double r : res) cnt += r <= x;
  return static_cast<double>(cnt) / static_cast<double>(res.size());
}

/// Weighted centered residual empirical process on an x-grid.
struct ProcessEval {
  ArchParams theta;
  std::vector<double> x;
  long n = 0;
  int p = 1;
  std::vector<double> values;  // component-major: values[k * m + i]

  double at(int k, std::size_t i) const { return values[static_cast<std::size_t>(k) * x.size() + i]; }
};

namespace detail {

/// Residuals and phi values for one (path, theta); reused across grid points.
struct RepWork {
  std::vector<double> res;        // residuals, later sorted
  std::vector<double> phi;        // p x n, component-major, sorted order
  std::vector<double> phi_total;  // per component
  std::vector<double> prefix;     // p x (n+1) prefix sums in residual order
};

inline void rep_prepare(const Path& path, const ArchParams& theta, const WeightFn& phi,
                        RepWork& w) {
  const long n = path.n();
  const int p = theta.p();
  w.res = residuals(path, theta);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return w.res[i] < w.res[j]; });

  std::vector<double> window(p), val(p);
  w.phi.assign(static_cast<std::size_t>(p) * n, 0.0);
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, p, window);
    phi(window, theta, val);
    for (int k = 0; k < p; ++k) w.phi[static_cast<std::size_t>(k) * n + (t - 1)] = val[k];
  }
  // Sort residuals and build per-component prefix sums in that order.
  std::vector<double> sorted_res(static_cast<std::size_t>(n));
  w.prefix.assign(static_cast<std::size_t>(p) * (n + 1), 0.0);
  w.phi_total.assign(p, 0.0);
  for (long i = 0; i < n; ++i) sorted_res[i] = w.res[order[i]];
  for (int k = 0; k < p; ++k) {
    const double* src = &w.phi[static_cast<std::size_t>(k) * n];
    double* pre = &w.prefix[static_cast<std::size_t>(k) * (n + 1)];
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
      acc += src[order[i]];
      pre[i + 1] = acc;
    }
    w.phi_total[k] = acc;
  }
  w.res = std::move(sorted_res);
}

}  // namespace detail

/// W_{n,k}(x_i, theta) = n^{-1/2} sum_t phi_k(Y_{t-1},theta)
/// [I{eps_t(theta) <= x_i} - G_n(x_i, theta)], computed once per theta in
/// O(n (log n + p) + m (p + log n)). The centering uses the integer count, so
/// a constant phi gives exact zeros.
inline ProcessEval rep_eval(const Path& path, const ArchParams& theta, const WeightFn& phi,
                            const XGrid& grid) {
  const long n = path.n();
  const int p = theta.p();
  detail::RepWork w;
  detail::rep_prepare(path, theta, phi, w);

  ProcessEval ev;
  ev.theta = theta;
  ev.x = grid.points;
  ev.n = n;
  ev.p = p;
  ev.values.assign(static_cast<std::size_t>(p) * grid.size(), 0.0);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    long cnt = std::upper_bound(w.res.begin(), w.res.end(), grid.points[i]) - w.res.begin();
    for (int k = 0; k < p; ++k) {
      double pref = w.prefix[static_cast<std::size_t>(k) * (n + 1) + cnt];
      double centered = pref - static_cast<double>(cnt) * w.phi_total[k] /
                                   static_cast<double>(n);
      ev.values[static_cast<std::size_t>(k) * grid.size() + i] = inv_sqrt_n * centered;
    }
  }
  return ev;
}

/// K_n(theta) = sum_i weight_i ||W_n(x_i, theta)||^norm_power, norm_power 1
/// per the original distance definition or 2 per the squared variant used by
/// the robustness theorem.
inline double md_objective_from_eval(const ProcessEval& ev, const XGrid& grid,
                                     int norm_power = 2) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s2 = 0.0;
    for (int k = 0; k < ev.p; ++k) {
      double v = ev.at(k, i);
      s2 += v * v;
    }
    acc += grid.weights[i] * (norm_power == 2 ? s2 : std::sqrt(s2));
  }
  return acc;
}

inline double md_objective(const Path& path, const ArchParams& theta, const WeightFn& phi,
                           const XGrid& grid, int norm_power = 2) {
  return md_objective_from_eval(rep_eval(path, theta, phi, grid), grid, norm_power);
}

/// GM score l_n(theta) = sum_t phi psi(eps_t(theta)) - (sum_t phi) psi_bar.
inline std::vector<double> gm_score(const Path& path, const ArchParams& theta,
                                    const WeightFn& phi, const PsiFn& psi) {
  const long n = path.n();
  const int p = theta.p();
  auto res = residuals(path, theta);
  std::vector<double> window(p), val(p), sum_phi_psi(p, 0.0), sum_phi(p, 0.0);
  double sum_psi = 0.0;
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, p, window);
    phi(window, theta, val);
    double pv = psi(res[t - 1]);
    sum_psi += pv;
    for (int k = 0; k < p; ++k) {
      sum_phi_psi[k] += val[k] * pv;
      sum_phi[k] += val[k];
    }
  }
  double psi_bar = sum_psi / static_cast<double>(n);
  std::vector<double> score(p);
  for (int k = 0; k < p; ++k) score[k] = sum_phi_psi[k] - sum_phi[k] * psi_bar;
  return score;
}

inline double gm_score_norm(const Path& path, const ArchParams& theta, const WeightFn& phi,
                            const PsiFn& psi) {
  auto s = gm_score(path, theta, phi, psi);
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc);
}

// --------------------------------------------------- Monte-Carlo drift oracle

/// One fresh stationary (Y_0, y_1) pair per replicate.
struct StationaryDraw {
  std::vector<double> window;  // Y_0 = (y_0, ..., y_{1-p})
  double y1 = 0.0;
  double eps1 = 0.0;
};

inline StationaryDraw stationary_draw(const ArchParams& params, const InnovationSpec& spec,
                                      RngStream rng, long burn_in = 512) {
  const int p = params.p();
  Path path = simulate_path(params, spec, 1, burn_in, rng.next_u64());
  StationaryDraw d;
  d.window.resize(p);
  path.lag_window(0, p, d.window);
  d.y1 = path.y(1);
  d.eps1 = path.eps(1);
  return d;
}

/// Monte-Carlo estimate of the centered indicator drift
///   b_k(x, theta) = E phi_k(Y_0,theta) I{eps_1(theta)<=x}
///                 - E phi_k(Y_0,theta) P(eps_1(theta)<=x)
/// on a grid, with per-point standard errors (sd of the per-replicate
/// centered product over sqrt(reps)).
struct BiasOracle {
  ArchParams theta;
  std::vector<double> x;
  std::vector<double> b;   // p x m component-major
  std::vector<double> se;  // same layout
  long reps = 0;

  double at(int k, std::size_t i) const { return b[static_cast<std::size_t>(k) * x.size() + i]; }
  double se_at(int k, std::size_t i) const {
    return se[static_cast<std::size_t>(k) * x.size() + i];
  }
};

inline BiasOracle bias_oracle(const ArchParams& a, const ArchParams& theta,
                              const WeightFn& phi, const InnovationSpec& spec,
                              const XGrid& grid, long reps, std::uint64_t seed,
                              long burn_in = 512) {
  const int p = theta.p();
  const std::size_t m = grid.size();
  RngStream root(seed);
  std::vector<double> phis(static_cast<std::size_t>(reps) * p);
  std::vector<double> rres(static_cast<std::size_t>(reps));
  std::vector<double> val(p);
  for (long r = 0; r < reps; ++r) {
    auto d = stationary_draw(a, spec, root.child(static_cast<std::uint64_t>(r)), burn_in);
    phi(d.window, theta, val);
    for (int k = 0; k < p; ++k) phis[static_cast<std::size_t>(r) * p + k] = val[k];
    rres[r] = d.y1 / std::sqrt(cond_variance(theta, d.window));
  }
  std::vector<double> phi_mean(p, 0.0);
  for (long r = 0; r < reps; ++r)
    for (int k = 0; k < p; ++k) phi_mean[k] += phis[static_cast<std::size_t>(r) * p + k];
  for (int k = 0; k < p; ++k) phi_mean[k] /= static_cast<double>(reps);

  // Sort replicates by residual; indicator means become prefix counts.
  std::vector<std::size_t> order(static_cast<std::size_t>(reps));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return rres[i] < rres[j]; });

  BiasOracle out;
  out.theta = theta;
  out.x = grid.points;
  out.reps = reps;
  out.b.assign(static_cast<std::size_t>(p) * m, 0.0);
  out.se.assign(static_cast<std::size_t>(p) * m, 0.0);
  std::vector<double> sorted_res(static_cast<std::size_t>(reps));
  for (long r = 0; r < reps; ++r) sorted_res[r] = rres[order[r]];
  for (std::size_t i = 0; i < m; ++i) {
    long cnt = std::upper_bound(sorted_res.begin(), sorted_res.end(), grid.points[i]) -
               sorted_res.begin();
    double ind_mean = static_cast<double>(cnt) / static_cast<double>(reps);
    for (int k = 0; k < p; ++k) {
      // mean over replicates of (phi - phi_bar)(I - I_bar), and its sd.
      double s1 = 0.0, s2 = 0.0;
      for (long r = 0; r < reps; ++r) {
        bool in = r < cnt;  // sorted order
        double ph = phis[static_cast<std::size_t>(order[r]) * p + k];
        double prod = (ph - phi_mean[k]) * ((in ? 1.0 : 0.0) - ind_mean);
        s1 += prod;
        s2 += prod * prod;
      }
      double mean = s1 / static_cast<double>(reps);
      double var = s2 / static_cast<double>(reps) - mean * mean;
      out.b[static_cast<std::size_t>(k) * m + i] = mean;
      out.se[static_cast<std::size_t>(k) * m + i] =
          std::sqrt(std::max(var, 0.0) / static_cast<double>(reps));
    }
  }
  return out;
}

/// S_{phi,e}(a): covariance of the centered weight against the centered
/// e-ratio over stationary windows, with entrywise standard errors.
struct CrossMoment {
  int p = 1;
  std::vector<double> value;  // p x p row-major
  std::vector<double> se;
  long reps = 0;

  double at(int j, int k) const { return value[static_cast<std::size_t>(j) * p + k]; }
};

inline CrossMoment s_phi_e_matrix(const ArchParams& a, const WeightFn& phi,
                                  const InnovationSpec& spec, long reps, std::uint64_t seed,
                                  long burn_in = 512) {
  const int p = a.p();
  RngStream root(seed);
  std::vector<double> phis(static_cast<std::size_t>(reps) * p);
  std::vector<double> es(static_cast<std::size_t>(reps) * p);
  std::vector<double> val(p);
  for (long r = 0; r < reps; ++r) {
    auto d = stationary_draw(a, spec, root.child(static_cast<std::uint64_t>(r)), burn_in);
    phi(d.window, a, val);
    double s = cond_variance(a, d.window);
    for (int k = 0; k < p; ++k) {
      phis[static_cast<std::size_t>(r) * p + k] = val[k];
      es[static_cast<std::size_t>(r) * p + k] = d.window[k] * d.window[k] / s;
    }
  }
  std::vector<double> mphi(p, 0.0), me(p, 0.0);
  for (long r = 0; r < reps; ++r)
    for (int k = 0; k < p; ++k) {
      mphi[k] += phis[static_cast<std::size_t>(r) * p + k];
      me[k] += es[static_cast<std::size_t>(r) * p + k];
    }
  for (int k = 0; k < p; ++k) {
    mphi[k] /= static_cast<double>(reps);
    me[k] /= static_cast<double>(reps);
  }
  CrossMoment out;
  out.p = p;
  out.reps = reps;
  out.value.assign(static_cast<std::size_t>(p) * p, 0.0);
  out.se.assign(static_cast<std::size_t>(p) * p, 0.0);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      double s1 = 0.0, s2 = 0.0;
      for (long r = 0; r < reps; ++r) {
        double prod = (phis[static_cast<std::size_t>(r) * p + j] - mphi[j]) *
                      (es[static_cast<std::size_t>(r) * p + k] - me[k]);
        s1 += prod;
        s2 += prod * prod;
      }
      double mean = s1 / static_cast<double>(reps);
      double var = s2 / static_cast<double>(reps) - mean * mean;
      out.value[static_cast<std::size_t>(j) * p + k] = mean;
      out.se[static_cast<std::size_t>(j) * p + k] =
          std::sqrt(std::max(var, 0.0) / static_cast<double>(reps));
    }
  return out;
}

// ------------------------------------------------------------ AUL diagnostic

/// Grid of local perturbation directions with ||s|| <= B (includes 0).
inline std::vector<std::vector<double>> local_shift_grid(int p, double B, int per_axis = 9) {
  std::vector<std::vector<double>> out;
  std::vector<int> idx(p, 0);
  for (;;) {
    std::vector<double> s(p);
    double norm2 = 0.0;
    for (int d = 0; d < p; ++d) {
      s[d] = per_axis == 1 ? 0.0 : -B + 2.0 * B * idx[d] / (per_axis - 1);
      norm2 += s[d] * s[d];
    }
    if (norm2 <= B * B + 1e-12) out.push_back(s);
    int d = 0;
    while (d < p && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == p) break;
  }
  return out;
}

struct AulRow {
  long n = 0;
  double median_sup = 0.0;
  double p90_sup = 0.0;
};

struct AulReport {
  std::vector<AulRow> rows;
};

/// For each n, Monte-Carlo distribution of
///   sup_{||s||<=B, x in grid} || W_n(x,a) + (1/2) x g(x) S_{phi,e} s
///                               - W_n(x, a + n^{-1/2} s) ||
/// (the local linearization error of the process). Perturbed parameters are
/// projected onto the admissible set; for the tested configurations no
/// clamping occurs.
inline AulReport aul_diagnostic(const ArchParams& a, const WeightFn& phi,
                                const InnovationSpec& spec, std::span<const long> n_list,
                                double B, long reps, std::uint64_t seed,
                                const XGrid& grid, const CrossMoment& s_phi_e,
                                int s_points = 9) {
  const int p = a.p();
  auto shifts = local_shift_grid(p, B, s_points);
  AulReport report;
  RngStream root(seed);
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const long n = n_list[ni];
    std::vector<double> sups;
    sups.reserve(static_cast<std::size_t>(reps));
    for (long r = 0; r < reps; ++r) {
      std::uint64_t s =
          root.child(ni).child(static_cast<std::uint64_t>(r)).next_u64();
      Path path = simulate_path(a, spec, n, s);
      ProcessEval base = rep_eval(path, a, phi, grid);
      double sup = 0.0;
      for (const auto& shift : shifts) {
        ArchParams theta = a;
        bool clamped = false;
        for (int d = 0; d < p; ++d) {
          theta.a[d] += shift[d] / std::sqrt(static_cast<double>(n));
          if (theta.a[d] < 0.0) {
            theta.a[d] = 0.0;
            clamped = true;
          }
        }
        (void)clamped;
        ProcessEval pert = rep_eval(path, theta, phi, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          double x = grid.points[i];
          double drift_scale = 0.5 * x * spec.density(x);
          double norm2 = 0.0;
          for (int k = 0; k < p; ++k) {
            double drift = 0.0;
            for (int j = 0; j < p; ++j) drift += s_phi_e.at(k, j) * (theta.a[j] - a.a[j]);
            drift *= drift_scale * std::sqrt(static_cast<double>(n));
            double diff = base.at(k, i) + drift - pert.at(k, i);
            norm2 += diff * diff;
          }
          sup = std::max(sup, std::sqrt(norm2));
        }
      }
      sups.push_back(sup);
    }
    report.rows.push_back({n, median_of(sups), percentile_of(sups, 0.9)});
  }
  return report;
}

// ----------------------------------------------------- boundedness statistic

struct BoundednessResult {
  std::vector<double> plus_sups;   // per replicate
  std::vector<double> minus_sups;  // per replicate
  double plus_median = 0.0, plus_p90 = 0.0;
  double minus_median = 0.0, minus_p90 = 0.0;
};

/// Per replicate, the grid sup of the one-sided deviations
///   (W_{n,k}(x,theta) - n^{1/2}[b_k(x,theta) + rho ||theta-a||])^+  and
///   (W_{n,k}(x,theta) - n^{1/2}[b_k(x,theta) - rho ||theta-a||])^-.
/// The drift b is the Monte-Carlo oracle estimate; at theta == a it is zero
/// by the independence of eps_1 and Y_0, so it is not re-estimated there.
inline BoundednessResult boundedness_statistic(const ArchParams& a, const WeightFn& phi,
                                               const InnovationSpec& spec, double rho, long n,
                                               std::span<const ArchParams> theta_grid,
                                               const XGrid& grid, long reps,
                                               std::uint64_t seed, long oracle_reps = 2000) {
  const int p = a.p();
  const std::size_t m = grid.size();
  RngStream root(seed);
  std::vector<BiasOracle> oracles;
  std::vector<double> dists;
  for (std::size_t j = 0; j < theta_grid.size(); ++j) {
    double dist = l2_dist(theta_grid[j], a);
    dists.push_back(dist);
    if (dist == 0.0) {
      BiasOracle zero;
      zero.theta = a;
      zero.x = grid.points;
      zero.b.assign(static_cast<std::size_t>(p) * m, 0.0);
      zero.se.assign(static_cast<std::size_t>(p) * m, 0.0);
      oracles.push_back(std::move(zero));
    } else {
      oracles.push_back(bias_oracle(a, theta_grid[j], phi, spec, grid, oracle_reps,
                                    root.child(1000 + j).next_u64()));
    }
  }

  BoundednessResult out;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (long r = 0; r < reps; ++r) {
    Path path = simulate_path(a, spec, n, root.child(static_cast<std::uint64_t>(r)).next_u64());
    double plus = 0.0, minus = 0.0;
    for (std::size_t j = 0; j < theta_grid.size(); ++j) {
      ProcessEval ev = rep_eval(path, theta_grid[j], phi, grid);
      for (int k = 0; k < p; ++k)
        for (std::size_t i = 0; i < m; ++i) {
          double w = ev.at(k, i);
          double b = oracles[j].at(k, i);
          double up = w - sqrt_n * (b + rho * dists[j]);
          double dn = w - sqrt_n * (b - rho * dists[j]);
          plus = std::max(plus, up);
          minus = std::max(minus, -dn);
        }
    }
    out.plus_sups.push_back(plus);
    out.minus_sups.push_back(minus);
  }
  out.plus_median = median_of(out.plus_sups);
  out.plus_p90 = percentile_of(out.plus_sups, 0.9);
  out.minus_median = median_of(out.minus_sups);
  out.minus_p90 = percentile_of(out.minus_sups, 0.9);
  return out;
}

}  // namespace arep
