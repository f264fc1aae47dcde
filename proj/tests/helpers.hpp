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
//
// Test-only oracles, kept independent of the library code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "arep/arep.hpp"

namespace arep_test {

/// Gaussian KDE with optional reflection at known finite support edges
/// (removes the boundary bias when the target density has a hard cutoff).
struct Kde {
  std::vector<double> sample;
  double bandwidth;
  double lo = -arep::kInf, hi = arep::kInf;

  explicit Kde(std::vector<double> xs, double lo_ = -arep::kInf, double hi_ = arep::kInf)
      : sample(std::move(xs)), lo(lo_), hi(hi_) {
    double sd = std::sqrt(arep::variance_of(sample));
    bandwidth = 1.06 * sd * std::pow(static_cast<double>(sample.size()), -0.2);
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (double s : sample) {
      acc += arep::normal_pdf((x - s) / bandwidth);
      if (std::isfinite(lo)) acc += arep::normal_pdf((x - (2.0 * lo - s)) / bandwidth);
      if (std::isfinite(hi)) acc += arep::normal_pdf((x - (2.0 * hi - s)) / bandwidth);
    }
    return acc / (static_cast<double>(sample.size()) * bandwidth);
  }
};

/// Brute-force residual empirical process: the literal double loop over
/// observations and grid points.
inline arep::ProcessEval rep_eval_naive(const arep::Path& path, const arep::ArchParams& theta,
                                        const arep::WeightFn& phi, const arep::XGrid& grid) {
  const long n = path.n();
  const int p = theta.p();
  arep::ProcessEval ev;
  ev.theta = theta;
  ev.x = grid.points;
  ev.n = n;
  ev.p = p;
  ev.values.assign(static_cast<std::size_t>(p) * grid.size(), 0.0);
  std::vector<double> window(p), val(p);
  std::vector<double> res(n);
  for (long t = 1; t <= n; ++t) {
    path.lag_window(t - 1, p, window);
    res[t - 1] = path.y(t) / std::sqrt(arep::cond_variance(theta, window));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = grid.points[i];
    double gn = 0.0;
    for (long t = 1; t <= n; ++t) gn += res[t - 1] <= x ? 1.0 : 0.0;
    gn /= static_cast<double>(n);
    for (long t = 1; t <= n; ++t) {
      path.lag_window(t - 1, p, window);
      phi(window, theta, val);
      double ind = res[t - 1] <= x ? 1.0 : 0.0;
      for (int k = 0; k < p; ++k)
        ev.values[static_cast<std::size_t>(k) * grid.size() + i] += val[k] * (ind - gn);
    }
  }
  for (auto& v : ev.values) v /= std::sqrt(static_cast<double>(n));
  return ev;
}

/// Stationary second moment by fixed-point iteration of v = E eps^2 (1 + ||a||_1 v).
inline double stationary_moment_fixed_point(double e2, double l1) {
  double v = e2;
  for (int it = 0; it < 10000; ++it) {
    double nv = e2 * (1.0 + l1 * v);
    if (std::fabs(nv - v) < 1e-15) return nv;
    v = nv;
  }
  return v;
}

/// Brute-force Euclidean projection onto {x >= 0, ||x||_1 <= cap} by lattice
/// scan (test oracle for the closed-form projection).
inline std::vector<double> projection_grid_oracle(std::span<const double> point, double cap,
                                                  double step) {
  std::vector<double> best;
  double best_d2 = arep::kInf;
  if (point.size() == 2) {
    for (double x = 0.0; x <= cap + 1e-12; x += step)
      for (double y = 0.0; x + y <= cap + 1e-12; y += step) {
        double d2 = (x - point[0]) * (x - point[0]) + (y - point[1]) * (y - point[1]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = {x, y};
        }
      }
  } else {
    for (double x = 0.0; x <= cap + 1e-12; x += step) {
      double d2 = (x - point[0]) * (x - point[0]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {x};
      }
    }
  }
  return best;
}

}  // namespace arep_test
