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

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "arep/errors.hpp"
#include "arep/innovations.hpp"
#include "arep/params.hpp"
#include "arep/rng.hpp"

namespace arep {

inline long default_burn_in(int p) { return 2000 + 50L * p; }

/// Simulated series y_{1-p}, ..., y_n with its provenance. `innovations`
/// holds the draws eps_t aligned with `values`; it is empty for paths that
/// were contaminated or loaded from disk.
struct Path {
  int p = 1;
  std::vector<double> values;       // times 1-p .. n
  std::vector<double> innovations;  // same indexing, may be empty
  ArchParams params;
  std::uint64_t seed = 0;
  long burn_in = 0;

  long n() const { return static_cast<long>(values.size()) - p; }

  double y(long t) const { return values[static_cast<std::size_t>(t + p - 1)]; }
  double eps(long t) const { return innovations[static_cast<std::size_t>(t + p - 1)]; }

  /// Lag window (y_{t}, y_{t-1}, ..., y_{t-q+1}) written into `out`.
  void lag_window(long t, int q, std::span<double> out) const {
    for (int i = 0; i < q; ++i) out[i] = y(t - i);
  }
};

/// Conditional variance s(theta, U) = 1 + sum theta_i U_i^2 over the first
/// theta.p() window entries.
inline double cond_variance(const ArchParams& theta, std::span<const double> window) {
  double s = 1.0;
  for (int i = 0; i < theta.p(); ++i) s += theta.a[i] * window[i] * window[i];
  return s;
}

/// Iterates the volatility recursion from zero initial lags, discards
/// `burn_in` values and returns the last n+p as y_{1-p..n}. Burn-in draws
/// come from a separate child stream, so the kept-epoch innovation stream is
/// identical across burn_in choices with the same seed.
inline Path simulate_path(const ArchParams& params, const InnovationSpec& spec, long n,
                          long burn_in, std::uint64_t seed) {
  const int p = params.p();
  double e2 = spec.moments.require(spec.moments.second, "E eps^2");
  if (e2 * params.l1() >= 1.0)
    throw NonStationaryError("E eps^2 * ||a||_1 >= 1: no stationary solution");

  RngStream root(seed);
  RngStream burn_rng = root.child(0);
  RngStream epoch_rng = root.child(1);

  const long total = burn_in + n + p;
  std::vector<double> ys(total, 0.0), es(total, 0.0);
  for (long i = 0; i < total; ++i) {
    double s = 1.0;
    for (int j = 1; j <= p; ++j) {
      long k = i - j;
      if (k >= 0) s += params.a[j - 1] * ys[k] * ys[k];
    }
    double eps = i < burn_in ? spec.sample(burn_rng) : spec.sample(epoch_rng);
    es[i] = eps;
    ys[i] = eps * std::sqrt(s);
  }

  Path path;
  path.p = p;
  path.params = params;
  path.seed = seed;
  path.burn_in = burn_in;
  path.values.assign(ys.begin() + burn_in, ys.end());
  path.innovations.assign(es.begin() + burn_in, es.end());
  return path;
}

inline Path simulate_path(const ArchParams& params, const InnovationSpec& spec, long n,
                          std::uint64_t seed) {
  return simulate_path(params, spec, n, default_burn_in(params.p()), seed);
}

/// Truncated quadratic expansion of y_t^2 in the innovations: the sum over
/// products a_{j_1}...a_{j_l} eps_t^2 eps_{t-j_1}^2 ... with at most L
/// factors. Evaluated by the equivalent depth recursion
///   V_d(s) = eps_s^2 (1 + sum_j a_j V_{d-1}(s-j)),   V_0(s) = eps_s^2,
/// which needs the L*p+1 innovations eps_{t-L*p}..eps_t; `eps_history` ends
/// at eps_t.
inline double volterra_squared(const ArchParams& params, std::span<const double> eps_history,
                               int L) {
  const int p = params.p();
  const long need = static_cast<long>(L) * p + 1;
  if (static_cast<long>(eps_history.size()) < need)
    throw HistoryTooShortError("volterra_squared needs L*p+1 innovations");
  const long t = static_cast<long>(eps_history.size()) - 1;  // index of eps_t
  // prev[d] over times; keep two rows of width L*p+1.
  std::vector<double> prev(need), cur(need);
  for (long i = 0; i < need; ++i) {
    double e = eps_history[t - need + 1 + i];
    prev[i] = e * e;  // depth 0
  }
  for (int d = 1; d <= L; ++d) {
    // Times s = t - (need-1) + i; depth d draws on depth d-1 at s - j.
    for (long i = 0; i < need; ++i) {
      double e = eps_history[t - need + 1 + i];
      double s = 1.0;
      for (int j = 1; j <= p; ++j)
        if (i - j >= 0) s += params.a[j - 1] * prev[i - j];
      cur[i] = e * e * s;
    }
    std::swap(prev, cur);
  }
  return prev[need - 1];
}

/// Closed-form stationary E y^2 = E eps^2 / (1 - E eps^2 ||a||_1).
inline double stationary_second_moment(const ArchParams& params, const InnovationSpec& spec) {
  double e2 = spec.moments.require(spec.moments.second, "E eps^2");
  double rate = e2 * params.l1();
  if (rate >= 1.0) throw NonStationaryError("E eps^2 * ||a||_1 >= 1");
  return e2 / (1.0 - rate);
}

// --------------------------------------------------------- CSV serialization

/// Columns t,y; the comment line records order, parameters, seed and burn-in.
inline void write_path_csv(const Path& path, std::ostream& os) {
  char buf[64];
  os << "# arep path p=" << path.p << " a=";
  for (int i = 0; i < path.p; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", path.params.a[i]);
    os << (i ? "," : "") << buf;
  }
  os << " seed=" << path.seed << " burn_in=" << path.burn_in << " n=" << path.n() << "\n";
  os << "t,y\n";
  for (long t = 1 - path.p; t <= path.n(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", path.y(t));
    os << t << "," << buf << "\n";
  }
}

inline Path read_path_csv(std::istream& is) {
  Path path;
  std::string line;
  bool have_meta = false;
  std::vector<double> ys;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t pos = line.find(" p=");
      if (pos != std::string::npos) {
        path.p = std::stoi(line.substr(pos + 3));
        std::size_t ap = line.find(" a=");
        if (ap != std::string::npos) {
          std::string rest = line.substr(ap + 3);
          std::string coeffs = rest.substr(0, rest.find(' '));
          std::stringstream ss(coeffs);
          std::string tok;
          while (std::getline(ss, tok, ',')) path.params.a.push_back(std::stod(tok));
        }
        std::size_t sp = line.find(" seed=");
        if (sp != std::string::npos) path.seed = std::stoull(line.substr(sp + 6));
        std::size_t bp = line.find(" burn_in=");
        if (bp != std::string::npos) path.burn_in = std::stol(line.substr(bp + 9));
        have_meta = true;
      }
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;  // header row
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) continue;
    ys.push_back(std::stod(line.substr(comma + 1)));
  }
  if (!have_meta) throw ConfigError("path CSV lacks the provenance comment line");
  if (static_cast<long>(ys.size()) < path.p)
    throw ConfigError("path CSV shorter than its order");
  path.values = std::move(ys);
  return path;
}

}  // namespace arep
