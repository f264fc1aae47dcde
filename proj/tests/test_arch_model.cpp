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
#include <sstream>

#include "arep/arch_model.hpp"
#include "helpers.hpp"

using namespace arep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("zero coefficients reproduce the innovations") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.0}), spec, 500, 7);
  for (long t = 1; t <= p.n(); ++t) REQUIRE(p.y(t) == p.eps(t));
}

TEST_CASE("stationary second moment closed form vs fixed-point oracle") {
  auto spec = standard_normal();
  SECTION("a = 0") {
    REQUIRE(stationary_second_moment(ArchParams({0.0}), spec) == 1.0);
  }
  SECTION("a = 0.5") {
    double oracle = arep_test::stationary_moment_fixed_point(1.0, 0.5);
    REQUIRE_THAT(oracle, WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(stationary_second_moment(ArchParams({0.5}), spec), WithinAbs(oracle, 1e-12));
  }
  SECTION("a = (0.25, 0.25)") {
    double oracle = arep_test::stationary_moment_fixed_point(1.0, 0.5);
    REQUIRE_THAT(stationary_second_moment(ArchParams({0.25, 0.25}), spec),
                 WithinAbs(oracle, 1e-12));
  }
  SECTION("nonstationary rejected") {
    REQUIRE_THROWS_AS(stationary_second_moment(ArchParams({1.0}), spec), NonStationaryError);
    REQUIRE_THROWS_AS(simulate_path(ArchParams({1.0}), spec, 10, 1), NonStationaryError);
  }
}

TEST_CASE("sample second moment matches the closed form over a Theta grid") {
  auto spec = standard_normal();
  std::vector<ArchParams> grid{ArchParams({0.2}), ArchParams({0.5}), ArchParams({0.7}),
                               ArchParams({0.3, 0.3}), ArchParams({0.1, 0.5})};
  int idx = 0;
  for (const auto& a : grid) {
    Path p = simulate_path(a, spec, 100000, 100 + idx++);
    double m2 = 0.0;
    for (long t = 1; t <= p.n(); ++t) m2 += p.y(t) * p.y(t);
    m2 /= p.n();
    double target = stationary_second_moment(a, spec);
    INFO("l1=" << a.l1());
    REQUIRE(std::fabs(m2 - target) / target <= 0.05);
  }
}

TEST_CASE("n = 0 returns the presample lags only") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.3, 0.2}), spec, 0, 5);
  REQUIRE(p.n() == 0);
  REQUIRE(p.values.size() == 2);
}

TEST_CASE("burn-in choice preserves the kept-epoch innovation stream") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  Path p1 = simulate_path(a, spec, 20000, 1000, 7);
  Path p2 = simulate_path(a, spec, 20000, 10000, 7);
  REQUIRE(p1.innovations == p2.innovations);
  // same innovations + geometric memory loss: quantiles nearly coincide
  std::vector<double> v1, v2;
  for (long t = 1; t <= p1.n(); ++t) {
    v1.push_back(p1.y(t));
    v2.push_back(p2.y(t));
  }
  for (double q = 0.1; q < 0.95; q += 0.1)
    REQUIRE_THAT(percentile_of(v1, q), WithinAbs(percentile_of(v2, q), 0.02));
}

TEST_CASE("volterra truncation basics") {
  ArchParams a({0.5});
  SECTION("L = 0 keeps only the innovation square") {
    std::vector<double> eps{2.0, 3.0};
    REQUIRE(volterra_squared(a, eps, 0) == 9.0);
  }
  SECTION("hand-expanded depth 1") {
    std::vector<double> eps{2.0, 1.0};  // eps_{t-1} = 2, eps_t = 1
    REQUIRE_THAT(volterra_squared(a, eps, 1), WithinAbs(1.0 + 0.5 * 1.0 * 4.0, 1e-14));
  }
  SECTION("history too short") {
    std::vector<double> eps{1.0};
    REQUIRE_THROWS_AS(volterra_squared(a, eps, 1), HistoryTooShortError);
  }
}

TEST_CASE("volterra at depth 40 matches the zero-started recursion") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  RngStream picker(99);
  for (int path_i = 0; path_i < 5; ++path_i) {
    Path p = simulate_path(a, spec, 3000, 500 + path_i);
    for (int probe = 0; probe < 100; ++probe) {
      long t = 60 + static_cast<long>(picker.next_u64() % (p.n() - 60));
      // independent oracle: run the variance recursion forward from zeros
      const int L = 40;
      double y2 = 0.0;
      for (long s = t - L; s <= t; ++s) {
        double e = p.eps(s);
        double prev = y2;
        y2 = e * e * (1.0 + a.a[0] * prev);
      }
      std::vector<double> hist;
      for (long s = t - L; s <= t; ++s) hist.push_back(p.eps(s));
      double v = volterra_squared(a, hist, L);
      REQUIRE_THAT(v, WithinRel(y2, 1e-10));
      // the truncated expansion also agrees with the full path value
      REQUIRE_THAT(v, WithinRel(p.y(t) * p.y(t), 1e-6));
    }
  }
}

TEST_CASE("volterra depth tail decays geometrically") {
  auto spec = standard_normal();
  ArchParams a({0.6, 0.2});
  Path p = simulate_path(a, spec, 4000, 11);
  std::vector<double> depths, log_gaps;
  for (int L = 4; L <= 24; L += 5) {
    double worst = 0.0;
    for (long t = 200; t <= 1200; t += 100) {
      std::vector<double> hist;
      for (long s = t - (L + 5) * a.p(); s <= t; ++s) hist.push_back(p.eps(s));
      double v1 = volterra_squared(a, hist, L);
      double v2 = volterra_squared(a, hist, L + 5);
      worst = std::max(worst, std::fabs(v2 - v1) / std::max(v2, 1e-12));
    }
    depths.push_back(L);
    log_gaps.push_back(std::log(std::max(worst, 1e-300)));
  }
  LinearFit fit = fit_linear(depths, log_gaps);
  REQUIRE(fit.slope < 0.0);  // log-linear decay of the truncation gap
}

TEST_CASE("path csv round trip") {
  auto spec = standard_normal();
  ArchParams a({0.4, 0.1});
  Path p = simulate_path(a, spec, 50, 21);
  std::ostringstream os;
  write_path_csv(p, os);
  std::istringstream is(os.str());
  Path q = read_path_csv(is);
  REQUIRE(q.p == p.p);
  REQUIRE(q.n() == p.n());
  REQUIRE(q.params.a == p.params.a);
  REQUIRE(q.seed == p.seed);
  for (std::size_t i = 0; i < p.values.size(); ++i) REQUIRE(q.values[i] == p.values[i]);
}
