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
#include <cstddef>
#include <vector>

#include "arep/stats.hpp"

namespace arep {

/// Coefficient vector of the conditional-variance recursion, with the leading
/// intercept normalized to 1. Membership in the admissible set requires
/// a_i >= 0 and ||a||_1 <= 1/beta_a.
struct ArchParams {
  std::vector<double> a;

  ArchParams() = default;
  explicit ArchParams(std::vector<double> coeffs) : a(std::move(coeffs)) {}

  int p() const { return static_cast<int>(a.size()); }

  double l1() const {
    double s = 0.0;
    for (double v : a) s += std::fabs(v);
    return s;
  }

  bool operator==(const ArchParams& o) const { return a == o.a; }
};

inline double l2_dist(const ArchParams& x, const ArchParams& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    double d = x.a[i] - y.a[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Admissible parameter set {theta_i >= 0, ||theta||_1 <= 1/beta_a}, plus an
/// optional l1-ball restriction around `center` with radius `delta`.
struct ParamDomain {
  double beta_a = 1.0;
  std::vector<double> center;  // empty: no ball restriction
  double delta = kInf;

  double l1_cap() const { return 1.0 / beta_a; }

  /// sup of ||a||_1 over the domain (used by the stationarity check).
  double sup_l1() const {
    double cap = l1_cap();
    if (center.empty() || !std::isfinite(delta)) return cap;
    double cl1 = 0.0;
    for (double v : center) cl1 += std::fabs(v);
    return std::min(cap, cl1 + delta);
  }

  bool contains(const ArchParams& theta, double tol = 1e-12) const {
    for (double v : theta.a)
      if (v < -tol) return false;
    return theta.l1() <= l1_cap() + tol;
  }
};

}  // namespace arep
