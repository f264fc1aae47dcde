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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "arep/rep_engine.hpp"

using namespace arep;
using Catch::Matchers::WithinAbs;

TEST_CASE("drift oracle vanishes at the true parameter") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 64);
  auto oracle = bias_oracle(a, a, clipped_e_phi(10.0), spec, grid, 3000, 13);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    INFO("grid point " << i);
    REQUIRE(std::fabs(oracle.at(0, i)) <= 3.0 * oracle.se_at(0, i));
  }
}

TEST_CASE("drift oracle is exactly zero for a constant weight") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 16);
  auto oracle = bias_oracle(a, ArchParams({0.8}), constant_phi(3.0), spec, grid, 200, 5);
  for (double b : oracle.b) REQUIRE_THAT(b, WithinAbs(0.0, 1e-12));
}

TEST_CASE("drift oracle vanishes in the far right tail") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  XGrid grid;
  grid.points = {1e9};
  grid.probs = {1.0};
  grid.weights = {1.0};
  auto oracle = bias_oracle(a, ArchParams({0.8}), clipped_e_phi(10.0), spec, grid, 500, 5);
  REQUIRE(oracle.at(0, 0) == 0.0);  // indicator identically one
}

TEST_CASE("drift oracle detects the nonzero drift away from truth") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 64);
  auto oracle = bias_oracle(a, ArchParams({0.8}), clipped_e_phi(10.0), spec, grid, 4000, 21);
  int significant = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    significant += std::fabs(oracle.at(0, i)) > 3.0 * oracle.se_at(0, i);
  REQUIRE(significant >= 5);
}

TEST_CASE("weight/e-ratio cross moment in the iid case matches Var(eps^2)") {
  auto spec = standard_normal();
  ArchParams zero({0.0});
  // Y_0 = eps_0 and e = eps_0^2, so pairing phi = e gives Var(chi^2_1) = 2.
  auto s = s_phi_e_matrix(zero, e_ratio_phi(), spec, 20000, 3);
  REQUIRE(std::fabs(s.at(0, 0) - 2.0) <= 3.0 * s.se[0]);
  REQUIRE_THAT(s.at(0, 0), WithinAbs(2.0, 0.15));
}

TEST_CASE("cross moment of a constant weight is zero") {
  auto spec = standard_normal();
  auto s = s_phi_e_matrix(ArchParams({0.5}), constant_phi(1.0), spec, 500, 4);
  REQUIRE_THAT(s.at(0, 0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("gram-structured cross moment is symmetric within noise") {
  auto spec = standard_normal();
  ArchParams a({0.3, 0.3});
  auto s = s_phi_e_matrix(a, e_ratio_phi(), spec, 8000, 5);
  // phi = e makes S a covariance matrix: symmetric and PSD up to MC noise
  double off_gap = std::fabs(s.at(0, 1) - s.at(1, 0));
  REQUIRE(off_gap <= 3.0 * (s.se[1] + s.se[2]));
  double det = s.at(0, 0) * s.at(1, 1) - s.at(0, 1) * s.at(1, 0);
  REQUIRE(s.at(0, 0) > 0.0);
  REQUIRE(det > -3.0 * (s.se[0] + s.se[1]));
}

TEST_CASE("local linearization error vanishes at zero shift") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 32);
  auto phi = clipped_e_phi(10.0);
  auto sphi = s_phi_e_matrix(a, phi, spec, 2000, 7);
  std::vector<long> ns{400};
  SECTION("B = 0 collapses the shift grid to the origin") {
    auto rep = aul_diagnostic(a, phi, spec, ns, 0.0, 5, 3, grid, sphi, 1);
    REQUIRE(rep.rows[0].median_sup == 0.0);
    REQUIRE(rep.rows[0].p90_sup == 0.0);
  }
}

TEST_CASE("local linearization error shrinks with n") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 64);
  auto phi = clipped_e_phi(10.0);
  auto sphi = s_phi_e_matrix(a, phi, spec, 20000, 99);
  std::vector<long> ns{500, 2000, 8000};
  auto rep = aul_diagnostic(a, phi, spec, ns, 2.0, 30, 77, grid, sphi, 9);
  REQUIRE(rep.rows.size() == 3);
  REQUIRE(rep.rows[0].median_sup > rep.rows[1].median_sup);
  REQUIRE(rep.rows[1].median_sup > rep.rows[2].median_sup);
}

TEST_CASE("boundedness statistic degenerate cases") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 16);
  SECTION("constant weight gives exactly zero") {
    std::vector<ArchParams> tg{ArchParams({0.8})};
    auto res = boundedness_statistic(a, constant_phi(1.0), spec, 1.0, 50, tg, grid, 5, 3, 100);
    for (double v : res.plus_sups) REQUIRE(v == 0.0);
    for (double v : res.minus_sups) REQUIRE(v == 0.0);
  }
  SECTION("huge rho kills the negative part away from truth") {
    std::vector<ArchParams> tg{ArchParams({0.9})};
    auto res =
        boundedness_statistic(a, clipped_e_phi(10.0), spec, 1e6, 200, tg, grid, 5, 3, 200);
    for (double v : res.minus_sups) REQUIRE(v == 0.0);
    for (double v : res.plus_sups) REQUIRE(v == 0.0);  // +rho dominates upward too
  }
}
