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
#include "helpers.hpp"

using namespace arep;
using Catch::Matchers::WithinAbs;

namespace {

Path path_from_values(int p, std::vector<double> values) {
  Path path;
  path.p = p;
  path.values = std::move(values);
  path.params = ArchParams(std::vector<double>(p, 0.0));
  return path;
}

}  // namespace

TEST_CASE("volatility evaluations") {
  std::vector<double> u1{2.0};
  auto [s0, sig0] = volatility(ArchParams({0.0}), u1);
  REQUIRE(s0 == 1.0);
  REQUIRE(sig0 == 1.0);
  auto [s1, sig1] = volatility(ArchParams({0.5}), u1);
  REQUIRE_THAT(s1, WithinAbs(3.0, 1e-15));
  REQUIRE_THAT(sig1, WithinAbs(std::sqrt(3.0), 1e-15));
  std::vector<double> u2{1.0, 1.0};
  auto [s2, sig2] = volatility(ArchParams({0.25, 0.25}), u2);
  REQUIRE_THAT(s2, WithinAbs(1.5, 1e-15));
}

TEST_CASE("residuals invert the observation equation") {
  auto spec = standard_normal();
  ArchParams a({0.4, 0.2});
  Path p = simulate_path(a, spec, 2000, 3);
  auto res = residuals(p, a);
  for (long t = 1; t <= p.n(); ++t)
    REQUIRE_THAT(res[t - 1], WithinAbs(p.eps(t), 1e-12));
  SECTION("theta = 0 returns the observations") {
    auto res0 = residuals(p, ArchParams({0.0, 0.0}));
    for (long t = 1; t <= p.n(); ++t) REQUIRE(res0[t - 1] == p.y(t));
  }
  SECTION("single value with known variance") {
    Path q = path_from_values(1, {std::sqrt(16.0), 3.0});  // window gives s = 9 at theta=0.5
    auto r = residuals(q, ArchParams({0.5}));
    REQUIRE_THAT(r[0], WithinAbs(1.0, 1e-15));
  }
  SECTION("order mismatch") {
    REQUIRE_THROWS_AS(residuals(p, ArchParams({0.1, 0.1, 0.1})), OrderMismatchError);
  }
}

TEST_CASE("residual ecdf basics") {
  Path p = path_from_values(1, {0.0, -1.0, 0.0, 1.0, 2.0});  // residuals at theta=0
  ArchParams t0({0.0});
  REQUIRE(residual_ecdf(p, t0, kInf) == 1.0);
  REQUIRE(residual_ecdf(p, t0, -5.0) == 0.0);
  REQUIRE(residual_ecdf(p, t0, 0.5) == 0.5);
}

TEST_CASE("constant weight centers the process to exact zero") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 1000, 5);
  auto grid = quantile_grid(spec, 64);
  auto ev = rep_eval(p, ArchParams({0.5}), constant_phi(1.0), grid);
  for (double v : ev.values) REQUIRE(v == 0.0);
}

TEST_CASE("two-point hand computation") {
  // residuals at theta=0 are (-1, 1); phi(U) = 3 - U gives weights (2, 4)
  Path p = path_from_values(1, {1.0, -1.0, 1.0});
  auto phi = user_phi("affine", [](std::span<const double> w, const ArchParams&,
                                   std::span<double> out) { out[0] = 3.0 - w[0]; });
  XGrid grid;
  grid.points = {0.0};
  grid.probs = {0.5};
  grid.weights = {1.0};
  auto ev = rep_eval(p, ArchParams({0.0}), phi, grid);
  REQUIRE_THAT(ev.at(0, 0), WithinAbs(-1.0 / std::sqrt(2.0), 1e-14));
}

TEST_CASE("process vanishes in both tails") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 500, 9);
  XGrid grid;
  grid.points = {-1e12, 1e12};
  grid.probs = {0.0, 1.0};
  grid.weights = {0.5, 0.5};
  auto ev = rep_eval(p, ArchParams({0.3}), clipped_e_phi(10.0), grid);
  REQUIRE(ev.at(0, 0) == 0.0);
  REQUIRE(ev.at(0, 1) == 0.0);
}

TEST_CASE("fast evaluation equals the brute-force double loop") {
  auto spec = standard_normal();
  RngStream rng(77);
  for (int cfg = 0; cfg < 20; ++cfg) {
    int p = 1 + static_cast<int>(rng.next_u64() % 2);
    std::vector<double> coeffs(p);
    for (auto& c : coeffs) c = 0.3 * rng.next_unit();
    ArchParams a(coeffs);
    long n = 50 + static_cast<long>(rng.next_u64() % 151);
    Path path = simulate_path(a, spec, n, 1000 + cfg);
    std::vector<double> trial(p);
    for (auto& c : trial) c = 0.8 * rng.next_unit() / p;
    ArchParams theta(trial);
    WeightFn phi = cfg % 3 == 0   ? clipped_e_phi(0.5 + 3.0 * rng.next_unit())
                   : cfg % 3 == 1 ? e_ratio_phi()
                                  : constant_phi(1.0 + rng.next_unit());
    int m = 8 + static_cast<int>(rng.next_u64() % 57);
    auto grid = quantile_grid(spec, m);
    auto fast = rep_eval(path, theta, phi, grid);
    auto naive = arep_test::rep_eval_naive(path, theta, phi, grid);
    for (std::size_t i = 0; i < fast.values.size(); ++i)
      REQUIRE_THAT(fast.values[i], WithinAbs(naive.values[i], 1e-10));
  }
}

TEST_CASE("adding a constant to the weight leaves the process unchanged") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 800, 31);
  auto grid = quantile_grid(spec, 32);
  ArchParams theta({0.35});
  auto base = clipped_e_phi(5.0);
  auto shifted = user_phi("clipped-e+7", [](std::span<const double> w, const ArchParams& th,
                                            std::span<double> out) {
    double s = cond_variance(th, w);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = std::min(w[k] * w[k] / s, 5.0) + 7.0;
  });
  auto e1 = rep_eval(p, theta, base, grid);
  auto e2 = rep_eval(p, theta, shifted, grid);
  for (std::size_t i = 0; i < e1.values.size(); ++i)
    REQUIRE_THAT(e1.values[i], WithinAbs(e2.values[i], 1e-12));
}

TEST_CASE("process magnitude bound") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 400, 13);
  auto grid = quantile_grid(spec, 16);
  auto phi = clipped_e_phi(2.0);
  auto ev = rep_eval(p, ArchParams({0.2}), phi, grid);
  double cap = 2.0 * std::sqrt(static_cast<double>(p.n())) * 2.0;
  for (double v : ev.values) REQUIRE(std::fabs(v) <= cap);
}

TEST_CASE("distance objective basics") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 600, 3);
  auto grid = quantile_grid(spec, 32);
  SECTION("constant weight gives zero for every theta and both powers") {
    for (double th : {0.0, 0.3, 0.8}) {
      REQUIRE(md_objective(p, ArchParams({th}), constant_phi(2.0), grid, 2) == 0.0);
      REQUIRE(md_objective(p, ArchParams({th}), constant_phi(2.0), grid, 1) == 0.0);
    }
  }
  SECTION("zero integrating masses give zero") {
    XGrid z = grid;
    std::fill(z.weights.begin(), z.weights.end(), 0.0);
    REQUIRE(md_objective(p, ArchParams({0.3}), clipped_e_phi(10.0), z, 2) == 0.0);
  }
}

TEST_CASE("objective is larger away from the truth in median") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto grid = quantile_grid(spec, 64);
  auto phi = clipped_e_phi(10.0);
  int wins = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    Path p = simulate_path(a, spec, 2000, 4000 + r);
    double at_truth = md_objective(p, a, phi, grid, 2);
    double away = md_objective(p, ArchParams({0.8}), phi, grid, 2);
    wins += at_truth < away;
  }
  REQUIRE(wins > reps / 2);  // median comparison
}

TEST_CASE("score basics") {
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 500, 3);
  SECTION("constant weight centers the score to exact zero") {
    auto s = gm_score(p, ArchParams({0.3}), constant_phi(1.0), PsiFn::identity());
    REQUIRE(s[0] == 0.0);
  }
  SECTION("single observation gives zero") {
    Path q = path_from_values(1, {0.7, 1.3});
    auto s = gm_score(q, ArchParams({0.2}), clipped_e_phi(10.0), PsiFn::identity());
    REQUIRE_THAT(s[0], WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("step-score identity: l_n equals -sqrt(n) * sum W dpsi for the sign score") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  Path p = simulate_path(a, spec, 700, 19);
  ArchParams theta({0.4});
  auto phi = clipped_e_phi(10.0);
  auto score = gm_score(p, theta, phi, PsiFn::sign());
  // sign has a single jump of size 2 at x = 0
  XGrid at_zero;
  at_zero.points = {0.0};
  at_zero.probs = {0.5};
  at_zero.weights = {1.0};
  auto ev = rep_eval(p, theta, phi, at_zero);
  double rhs = -std::sqrt(static_cast<double>(p.n())) * 2.0 * ev.at(0, 0);
  REQUIRE_THAT(score[0], WithinAbs(rhs, 1e-12));
}

TEST_CASE("score magnitude orders the truth below distant trials in median") {
  auto spec = standard_normal();
  ArchParams a({0.5});
  auto phi = clipped_e_phi(10.0);
  auto psi = PsiFn::clipped_square(2.0);  // identifying even score
  int wins = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    Path p = simulate_path(a, spec, 2000, 6000 + r);
    wins += gm_score_norm(p, a, phi, psi) < gm_score_norm(p, ArchParams({0.8}), phi, psi);
  }
  REQUIRE(wins > reps / 2);
}

TEST_CASE("odd scores are scale-blind for symmetric innovations") {
  // The score expectation vanishes identically in theta, so |l_n|/n is small
  // everywhere; this is why the even clipped-square score is the default for
  // estimation.
  auto spec = standard_normal();
  Path p = simulate_path(ArchParams({0.5}), spec, 20000, 23);
  auto phi = clipped_e_phi(10.0);
  for (double th : {0.2, 0.5, 0.8}) {
    double v = gm_score_norm(p, ArchParams({th}), phi, PsiFn::identity());
    REQUIRE(v / p.n() < 0.02);
    double vh = gm_score_norm(p, ArchParams({th}), phi, PsiFn::huber(1.345));
    REQUIRE(vh / p.n() < 0.02);
  }
  // whereas the even score has an order-n drift away from the truth
  REQUIRE(gm_score_norm(p, ArchParams({0.8}), phi, PsiFn::clipped_square(2.0)) / p.n() > 0.05);
}
