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

#include "arep/innovations.hpp"
#include "helpers.hpp"

using namespace arep;
using Catch::Matchers::WithinAbs;

namespace {
const InnovationSpec kLaws[] = {standard_normal(), student_t(4.0), uniform_symmetric(1.0)};
}

TEST_CASE("quantile/cdf round trip on a 1e-3 grid") {
  for (const auto& spec : kLaws) {
    for (int i = 1; i < 1000; ++i) {
      double u = i / 1000.0;
      REQUIRE_THAT(spec.cdf(spec.quantile(u)), WithinAbs(u, 1e-9));
    }
  }
}

TEST_CASE("cdf(quantile) inverse on x grid where density is positive") {
  auto norm = standard_normal();
  for (double x = -5.0; x <= 5.0; x += 0.1)
    REQUIRE_THAT(norm.quantile(norm.cdf(x)), WithinAbs(x, 1e-9));
}

TEST_CASE("density integrates to one on the tabulated support") {
  for (const auto& spec : kLaws) {
    double lo = std::isfinite(spec.support_lo) ? spec.support_lo : spec.quantile(1e-9);
    double hi = std::isfinite(spec.support_hi) ? spec.support_hi : spec.quantile(1.0 - 1e-9);
    const int intervals = 40000;  // Simpson
    double h = (hi - lo) / intervals;
    double acc = spec.density(lo) + spec.density(hi);
    for (int i = 1; i < intervals; ++i)
      acc += spec.density(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    acc *= h / 3.0;
    REQUIRE_THAT(acc, WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("moment table consistency: E eps^2 <= sqrt(E eps^4)") {
  for (const auto& spec : kLaws)
    REQUIRE(spec.moments.second <= std::sqrt(spec.moments.fourth) + 1e-12);
}

TEST_CASE("sampling determinism and law moments") {
  auto norm = standard_normal();
  auto s1 = sample_innovations(norm, 2000, 7);
  auto s2 = sample_innovations(norm, 2000, 7);
  REQUIRE(s1 == s2);  // bit-identical

  auto big = sample_innovations(norm, 100000, 7);
  REQUIRE_THAT(mean_of(big), WithinAbs(0.0, 0.02));
  double m2 = 0.0;
  for (double x : big) m2 += x * x;
  m2 /= big.size();
  REQUIRE(m2 >= 0.98);
  REQUIRE(m2 <= 1.02);
}

TEST_CASE("uniform law second moment matches the analytic oracle") {
  const double exact = 1.0 / 3.0;  // int_{-1}^{1} x^2/2 dx
  auto uni = uniform_symmetric(1.0);
  REQUIRE_THAT(uni.moments.second, WithinAbs(exact, 1e-15));
  auto xs = sample_innovations(uni, 100000, 3);
  double m2 = 0.0;
  for (double x : xs) m2 += x * x;
  REQUIRE_THAT(m2 / xs.size(), WithinAbs(exact, 0.01));
}

TEST_CASE("kde of samples tracks the density between the 1% and 99% quantiles") {
  for (const auto& spec : kLaws) {
    auto xs = sample_innovations(spec, 100000, 17);
    arep_test::Kde kde(std::move(xs), spec.support_lo, spec.support_hi);
    double lo = spec.quantile(0.01), hi = spec.quantile(0.99);
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double x = lo + (hi - lo) * i / 200.0;
      sup = std::max(sup, std::fabs(kde(x) - spec.density(x)));
    }
    INFO(spec.name);
    REQUIRE(sup <= 0.02);
  }
}

TEST_CASE("condition report for the built-in laws") {
  ParamDomain domain;  // beta_a = 1 -> sup l1 = 1
  auto norm_rep = check_conditions(standard_normal(0.5), domain);
  REQUIRE(norm_rep.condition1());
  REQUIRE(norm_rep.condition3());
  REQUIRE(norm_rep.condition5());

  // heavier-than-8th-moment tails: condition 5 must fail for t(4)
  auto t4_rep = check_conditions(student_t(4.0), domain);
  REQUIRE(t4_rep.condition1());
  REQUIRE(t4_rep.condition3());
  REQUIRE_FALSE(t4_rep.condition5());

  // uniform: tails vanish abruptly, |x g(x)| stays large at the scan edge
  auto uni_rep = check_conditions(uniform_symmetric(1.0), domain);
  REQUIRE(uni_rep.condition1());
  REQUIRE_FALSE(uni_rep.tail_ok);
  REQUIRE(uni_rep.condition5());
}

TEST_CASE("condition 1 depends on the domain cap") {
  ParamDomain tight;
  tight.beta_a = 1.0 / 0.9;  // sup ||a||_1 = 0.9
  REQUIRE(check_conditions(standard_normal(), tight).stationary);
  ParamDomain loose;
  loose.beta_a = 0.5;  // sup ||a||_1 = 2 -> product 2 >= 1
  REQUIRE_FALSE(check_conditions(standard_normal(), loose).stationary);
}

TEST_CASE("missing moments raise") {
  InnovationSpec s = standard_normal();
  s.moments.second = kNaN;
  REQUIRE_THROWS_AS(check_conditions(s, ParamDomain{}), MissingMomentError);
}

TEST_CASE("user-tabulated triangular law round-trips") {
  // triangle on [-1, 1]
  std::vector<double> xs, gs;
  for (int i = 0; i <= 200; ++i) {
    double x = -1.0 + 2.0 * i / 200.0;
    xs.push_back(x);
    gs.push_back(1.0 - std::fabs(x));
  }
  MomentsTable m;
  m.abs_mean = 1.0 / 3.0;
  m.second = 1.0 / 6.0;
  m.fourth = 1.0 / 15.0;
  m.high_order = 2.0 / ((8.5 + 1.0) * (8.5 + 2.0));
  auto law = user_tabulated("triangle", xs, gs, m, 0.5);
  for (int i = 1; i < 100; ++i) {
    double u = i / 100.0;
    REQUIRE_THAT(law.cdf(law.quantile(u)), WithinAbs(u, 1e-9));
  }
  REQUIRE_THAT(law.density(0.0), WithinAbs(1.0, 1e-9));
}
