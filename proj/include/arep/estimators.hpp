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
#include <vector>

#include "arep/params.hpp"
#include "arep/rep_engine.hpp"
#include "arep/rng.hpp"

namespace arep {

/// Euclidean projection onto {theta_i >= 0, ||theta||_1 <= 1/beta_a}: clip
/// negatives, then the standard simplex threshold when the l1 cap binds.
/// Idempotent; the composition is the exact projection because the simplex
/// step never resurrects a clipped coordinate.
inline ArchParams project_to_domain(std::vector<double> theta, const ParamDomain& domain) {
  for (auto& v : theta) v = std::max(v, 0.0);
  double cap = domain.l1_cap();
  double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  if (sum > cap) {
    std::vector<double> sorted(theta);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double acc = 0.0, lambda = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      acc += sorted[i];
      double cand = (acc - cap) / static_cast<double>(i + 1);
      if (i + 1 == sorted.size() || sorted[i + 1] <= cand) {
        lambda = cand;
        break;
      }
    }
    for (auto& v : theta) v = std::max(v - lambda, 0.0);
  }
  return ArchParams(std::move(theta));
}

struct EstimateOptions {
  int restarts = 20;
  long max_evals_per_restart = 400;
  double tol_diameter = 1e-4;
  double tol_spread = 1e-10;
  std::uint64_t seed = 0;
  int norm_power = 2;
  bool keep_trace = false;
};

struct EstimateResult {
  ArchParams theta_hat;
  double objective_value = kNaN;
  long n_evals = 0;
  int restarts_used = 0;
  bool converged = false;
  bool non_identified = false;
  std::vector<std::pair<std::vector<double>, double>> trace;
};

namespace detail {

struct NmOutcome {
  std::vector<double> x;
  double value = kInf;
  long evals = 0;
  bool converged = false;
};

/// Nelder-Mead with projection of every proposal onto the domain. The
/// objective is a step function of theta for the distance estimators, so no
/// derivative information is assumed anywhere.
inline NmOutcome nelder_mead(const std::function<double(const ArchParams&)>& objective,
                             const std::vector<double>& start, const ParamDomain& domain,
                             long max_evals, double tol_diameter, double tol_spread) {
  const int p = static_cast<int>(start.size());
  NmOutcome out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evals;
    return objective(ArchParams(x));
  };

  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  double step = 0.05 * domain.l1_cap();
  pts.push_back(project_to_domain(start, domain).a);
  for (int d = 0; d < p; ++d) {
    auto x = start;
    x[d] += x[d] + step <= domain.l1_cap() ? step : -step;
    pts.push_back(project_to_domain(x, domain).a);
  }
  for (auto& x : pts) vals.push_back(eval(x));

  auto order = [&] {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
      return vals[i] < vals[j];
    });
    std::vector<std::vector<double>> np;
    std::vector<double> nv;
    for (auto i : idx) {
      np.push_back(pts[i]);
      nv.push_back(vals[i]);
    }
    pts = std::move(np);
    vals = std::move(nv);
  };
  auto diameter = [&] {
    double dmax = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double d2 = 0.0;
        for (int k = 0; k < p; ++k) {
          double d = pts[i][k] - pts[j][k];
          d2 += d * d;
        }
        dmax = std::max(dmax, std::sqrt(d2));
      }
    return dmax;
  };

  while (out.evals < max_evals) {
    order();
    if (diameter() < tol_diameter || vals.back() - vals.front() < tol_spread) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(p, 0.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      for (int k = 0; k < p; ++k) centroid[k] += pts[i][k];
    for (int k = 0; k < p; ++k) centroid[k] /= static_cast<double>(pts.size() - 1);

    auto propose = [&](double coef) {
      std::vector<double> x(p);
      for (int k = 0; k < p; ++k) x[k] = centroid[k] + coef * (centroid[k] - pts.back()[k]);
      return project_to_domain(std::move(x), domain).a;
    };

    auto xr = propose(1.0);
    double fr = eval(xr);
    if (fr < vals.front()) {
      auto xe = propose(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        pts.back() = xe;
        vals.back() = fe;
      } else {
        pts.back() = xr;
        vals.back() = fr;
      }
    } else if (fr < vals[pts.size() - 2]) {
      pts.back() = xr;
      vals.back() = fr;
    } else {
      bool outside = fr < vals.back();
      auto xc = propose(outside ? 0.5 : -0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, vals.back())) {
        pts.back() = xc;
        vals.back() = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i < pts.size(); ++i) {
          for (int k = 0; k < p; ++k) pts[i][k] = 0.5 * (pts[i][k] + pts[0][k]);
          pts[i] = project_to_domain(pts[i], domain).a;
          vals[i] = eval(pts[i]);
          if (out.evals >= max_evals) break;
        }
      }
    }
  }
  order();
  out.x = pts.front();
  out.value = vals.front();
  return out;
}

/// Latin-hypercube restart points over the domain box, then projected.
inline std::vector<std::vector<double>> lhs_starts(int p, int restarts,
                                                   const ParamDomain& domain, RngStream rng) {
  std::vector<std::vector<int>> perms(p, std::vector<int>(restarts));
  for (int d = 0; d < p; ++d) {
    std::iota(perms[d].begin(), perms[d].end(), 0);
    for (int i = restarts - 1; i > 0; --i) {
      int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(perms[d][i], perms[d][j]);
    }
  }
  std::vector<std::vector<double>> starts;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x(p);
    for (int d = 0; d < p; ++d)
      x[d] = (perms[d][r] + rng.next_unit()) / restarts * domain.l1_cap();
    starts.push_back(project_to_domain(std::move(x), domain).a);
  }
  return starts;
}

/// lexicographic-after-l1 tie-break; deterministic merge of restarts.
inline bool better(const std::vector<double>& xa, double fa, const std::vector<double>& xb,
                   double fb) {
  if (fa != fb) return fa < fb;
  double la = std::accumulate(xa.begin(), xa.end(), 0.0);
  double lb = std::accumulate(xb.begin(), xb.end(), 0.0);
  if (la != lb) return la < lb;
  return xa < xb;
}

inline EstimateResult run_multistart(const std::function<double(const ArchParams&)>& objective,
                                     int p, const ParamDomain& domain,
                                     const EstimateOptions& opts) {
  EstimateResult res;
  RngStream rng = RngStream(opts.seed).child(0x715EC7);
  auto starts = lhs_starts(p, opts.restarts, domain, rng);
  bool any_converged = false;
  double max_seen = -kInf;
  std::vector<double> best;
  double best_val = kInf;
  for (int r = 0; r < opts.restarts; ++r) {
    auto nm = nelder_mead(objective, starts[r], domain, opts.max_evals_per_restart,
                          opts.tol_diameter, opts.tol_spread);
    res.n_evals += nm.evals;
    any_converged = any_converged || nm.converged;
    max_seen = std::max(max_seen, nm.value);
    if (opts.keep_trace) res.trace.emplace_back(nm.x, nm.value);
    if (best.empty() || better(nm.x, nm.value, best, best_val)) {
      best = nm.x;
      best_val = nm.value;
    }
  }
  res.restarts_used = opts.restarts;
  res.theta_hat = ArchParams(best);
  res.non_identified = max_seen < 1e-18;  // objective vanishes everywhere
  res.converged = any_converged && !res.non_identified;
  return res;
}

}  // namespace detail

/// Minimum-distance estimator: multistart projected Nelder-Mead on the
/// integrated process norm. Deterministic in opts.seed.
inline EstimateResult estimate_md(const Path& path, const WeightFn& phi, const XGrid& grid,
                                  const ParamDomain& domain, const EstimateOptions& opts) {
  const int p = path.p;
  if (path.n() < 50L * p) throw PathTooShortError("estimate_md needs n >= 50 p");
  auto objective = [&](const ArchParams& theta) {
    return md_objective(path, theta, phi, grid, opts.norm_power);
  };
  EstimateResult res = detail::run_multistart(objective, p, domain, opts);
  res.objective_value = objective(res.theta_hat);
  return res;
}

/// Generalized-M estimator: approximate zero of the score, found by
/// minimizing ||l_n||^2 with the same machinery; objective_value reports the
/// residual norm ||l_n(theta_hat)||.
inline EstimateResult estimate_gm(const Path& path, const WeightFn& phi, const PsiFn& psi,
                                  const ParamDomain& domain, const EstimateOptions& opts) {
  const int p = path.p;
  if (path.n() < 50L * p) throw PathTooShortError("estimate_gm needs n >= 50 p");
  auto objective = [&](const ArchParams& theta) {
    double v = gm_score_norm(path, theta, phi, psi);
    return v * v;
  };
  EstimateResult res = detail::run_multistart(objective, p, domain, opts);
  res.objective_value = gm_score_norm(path, res.theta_hat, phi, psi);
  return res;
}

/// Exhaustive lattice scan over the admissible set (p <= 2): the brute-force
/// reference minimizer used to calibrate thresholds.
inline EstimateResult grid_scan(const std::function<double(const ArchParams&)>& objective,
                                int p, const ParamDomain& domain, double step = 0.02) {
  if (p > 2) throw ConfigError("grid_scan supports p <= 2 only");
  EstimateResult res;
  std::vector<double> best;
  double best_val = kInf;
  long steps = static_cast<long>(std::floor(domain.l1_cap() / step));
  auto consider = [&](std::vector<double> x) {
    double v = objective(ArchParams(x));
    ++res.n_evals;
    if (best.empty() || detail::better(x, v, best, best_val)) {
      best = std::move(x);
      best_val = v;
    }
  };
  if (p == 1) {
    for (long i = 0; i <= steps; ++i) consider({i * step});
  } else {
    for (long i = 0; i <= steps; ++i)
      for (long j = 0; i * step + j * step <= domain.l1_cap() + 1e-12; ++j)
        consider({i * step, j * step});
  }
  res.theta_hat = ArchParams(best);
  res.objective_value = best_val;
  res.converged = true;
  res.restarts_used = 0;
  return res;
}

inline EstimateResult grid_scan_md(const Path& path, const WeightFn& phi, const XGrid& grid,
                                   const ParamDomain& domain, double step = 0.02,
                                   int norm_power = 2) {
  return grid_scan(
      [&](const ArchParams& theta) { return md_objective(path, theta, phi, grid, norm_power); },
      path.p, domain, step);
}

// ------------------------------------------------------- identification check

enum class EstimatorKind { md, gm };

struct IdentificationReport {
  bool applicable = false;
  double delta0_hat = kNaN;
  double se = kNaN;
  std::vector<double> per_theta_ratio;
  bool positive_at_3se = false;
};

/// Empirical lower bound for the identification constant: the minimum over
/// trial parameters of the drift-to-distance ratio of the relevant condition
/// (integrated ||b||^2 for MD, ||∫b dψ|| for GM). Standard errors come from
/// 10 independent replicate batches.
inline IdentificationReport identification_check(const ArchParams& a, const WeightFn& phi,
                                                 const InnovationSpec& spec, const XGrid& grid,
                                                 std::span<const ArchParams> theta_grid,
                                                 long reps, std::uint64_t seed,
                                                 EstimatorKind mode,
                                                 const PsiFn& psi = PsiFn::clipped_square(2.0)) {
  IdentificationReport rep;
  std::vector<const ArchParams*> thetas;
  for (const auto& th : theta_grid)
    if (l2_dist(th, a) > 0) thetas.push_back(&th);
  if (thetas.empty()) return rep;  // NotApplicable
  rep.applicable = true;

  const int batches = 10;
  const long per_batch = std::max<long>(reps / batches, 1);
  const std::size_t m = grid.size();
  // Stieltjes masses for the GM functional: each grid node carries the psi
  // increment of its midpoint cell.
  std::vector<double> dpsi(m, 0.0);
  if (mode == EstimatorKind::gm) {
    for (std::size_t i = 0; i < m; ++i) {
      double left = i == 0 ? grid.points.front() - (grid.points[1] - grid.points[0])
                           : 0.5 * (grid.points[i - 1] + grid.points[i]);
      double right = i + 1 == m
                         ? grid.points.back() + (grid.points[m - 1] - grid.points[m - 2])
                         : 0.5 * (grid.points[i] + grid.points[i + 1]);
      dpsi[i] = psi(right) - psi(left);
    }
  }

  RngStream root(seed);
  std::vector<double> batch_minima;
  std::vector<double> ratio_sums(thetas.size(), 0.0);
  for (int bt = 0; bt < batches; ++bt) {
    double batch_min = kInf;
    for (std::size_t j = 0; j < thetas.size(); ++j) {
      BiasOracle oracle = bias_oracle(a, *thetas[j], phi, spec, grid, per_batch,
                                      root.child(bt * 1000 + j).next_u64());
      double dist = l2_dist(*thetas[j], a);
      double ratio;
      if (mode == EstimatorKind::md) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double n2 = 0.0;
          for (int k = 0; k < a.p(); ++k) n2 += oracle.at(k, i) * oracle.at(k, i);
          acc += grid.weights[i] * n2;
        }
        ratio = acc / (dist * dist);
      } else {
        double n2 = 0.0;
        for (int k = 0; k < a.p(); ++k) {
          double integral = 0.0;
          for (std::size_t i = 0; i < m; ++i) integral += oracle.at(k, i) * dpsi[i];
          n2 += integral * integral;
        }
        ratio = std::sqrt(n2) / dist;
      }
      ratio_sums[j] += ratio;
      batch_min = std::min(batch_min, ratio);
    }
    batch_minima.push_back(batch_min);
  }
  rep.delta0_hat = mean_of(batch_minima);
  rep.se = std::sqrt(variance_of(batch_minima) / batches);
  for (std::size_t j = 0; j < thetas.size(); ++j)
    rep.per_theta_ratio.push_back(ratio_sums[j] / batches);
  rep.positive_at_3se = rep.delta0_hat > 3.0 * rep.se;
  return rep;
}

}  // namespace arep
