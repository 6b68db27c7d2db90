// Copyright 2026 The btl-fisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>

#include "btl/bounds.hpp"
#include "btl/error.hpp"
#include "btl/graph_gen.hpp"
#include "btl/spectral.hpp"

using namespace btl;

TEST_CASE("proxy h values") {
  CHECK(proxy_h(0.0) == 0.0);
  CHECK(proxy_h(3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(proxy_h(-8.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(proxy_h(1e-20) == doctest::Approx(5e-21).epsilon(1e-15));
  Eigen::VectorXd v(3);
  v << 3.0, -8.0, 0.0;
  const Eigen::VectorXd h = proxy_h_vec(v);
  CHECK(h[1] == doctest::Approx(-2.0));
  CHECK(proxy_error(v) == doctest::Approx(5.0));
}

TEST_CASE("proxy h envelope on a log grid") {
  for (int k = 0; k <= 4000; ++k) {
    const double a = std::pow(10.0, -6.0 + 12.0 * k / 4000.0);
    for (double x : {a, -a}) {
      const double h2 = proxy_h(x) * proxy_h(x);
      CHECK(h2 <= std::abs(x));
      CHECK(h2 >= std::abs(x) / 2.0 - 1.0);
      CHECK(h2 <= x * x / 4.0);
      // sgn(x) h(x)^2 = x - 2 h(x)
      const double lhs = (x < 0 ? -1.0 : 1.0) * h2;
      CHECK(std::abs(lhs - (x - 2.0 * proxy_h(x))) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("proxy h is odd and increasing") {
  double prev = proxy_h(-100.0);
  for (int k = 1; k <= 2000; ++k) {
    const double x = -100.0 + 0.1 * k;
    const double h = proxy_h(x);
    CHECK(h > prev);
    CHECK(proxy_h(-x) == -h);
    prev = h;
  }
}

TEST_CASE("proxy h contraction") {
  // (h(a) - h(b))^2 <= h(a - b)^2 holds for arguments of equal sign; across
  // the origin only with a factor 2 (h(30) - h(-30) is about 1.41 h(60)).
  for (int i = 0; i <= 120; ++i) {
    for (int j = 0; j <= 120; ++j) {
      const double a = -30.0 + 0.5 * i, b = -30.0 + 0.5 * j;
      const double diff = proxy_h(a) - proxy_h(b);
      const double bound = std::pow(proxy_h(a - b), 2) * (1 + 1e-14);
      if (a * b >= 0.0) CHECK(diff * diff <= bound);
      CHECK(diff * diff <= 2.0 * bound);
    }
  }
  CHECK(std::pow(proxy_h(30.0) - proxy_h(-30.0), 2) > std::pow(proxy_h(60.0), 2));
}

TEST_CASE("proxy sum inequality for zero-sum vectors") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> dim(2, 50);
  std::uniform_real_distribution<double> scale_exp(-3.0, 4.0);
  std::cauchy_distribution<double> cauchy;
  for (int k = 0; k < 2000; ++k) {
    const int d = dim(rng);
    const double scale = std::pow(10.0, scale_exp(rng));
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = scale * cauchy(rng);
    v.array() -= v.mean();
    const Eigen::VectorXd h = proxy_h_vec(v);
    CHECK(h.squaredNorm() >= 2.0 / d * h.sum() * h.sum() * (1 - 1e-12));
  }
}

TEST_CASE("bound formulas") {
  // w = 0 complete graph, d = 100, T = 5: kappa = 4, lambda2(I) = 1 / (2 (d - 1)).
  CHECK(l2_bound_ours(1.0 / 198.0, 4.0, 100, 24750.0, 1.0) ==
        doctest::Approx(3.2).epsilon(1e-13));
  CHECK(l2_bound_ours(0.01, 2.0, 50, 2000.0, 1.0) ==
        doctest::Approx(2.0 * l2_bound_ours(0.01, 2.0, 50, 4000.0, 1.0)));
  CHECK(l2_bound_shah(0.0, 1.0, 1, 1.0, 1.0) == doctest::Approx(16.0));
  CHECK(l2_bound_shah(1.0, 1.0, 1, 1.0, 1.0) ==
        doctest::Approx(90.71403120070202).epsilon(1e-13));
  CHECK(shah_gamma(1.0) == doctest::Approx(0.1049935854035065).epsilon(1e-13));
  CHECK(shah_zeta(3.0) == 1.0);
  CHECK_THROWS_AS(l2_bound_ours(0.0, 4.0, 10, 10.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(l2_bound_ours(0.1, 4.0, 10, 10.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(l2_bound_shah(1.0, -1.0, 10, 10.0, 1.0), ArgumentError);
}

TEST_CASE("banded bound reduces to the closed-form rate") {
  // kappa / lambda2(I) * d / n against d^3 / (T W^3) e^{4BW/d}: the ratio
  // stays within fixed constants across the grid.
  double lo = 1e300, hi = 0.0;
  for (int d : {40, 80}) {
    for (int w : {4, 8}) {
      for (double b : {0.5, 2.0}) {
        TopologySpec spec{TopologyKind::kBanded, d, 5};
        spec.width = w;
        const ComparisonSchedule s = generate_schedule(spec);
        const InstanceSpectrum sp = instance_spectrum(s, even_spread_scores(d, b));
        const double ours = l2_bound_ours(sp.fisher.lambda2, sp.kappa, d,
                                          static_cast<double>(s.total_comparisons()), 1.0);
        const double rate = std::pow(d, 3) / (5.0 * std::pow(w, 3)) * std::exp(4.0 * b * w / d);
        lo = std::min(lo, ours / rate);
        hi = std::max(hi, ours / rate);
      }
    }
  }
  CHECK(hi / lo < 16.0);
}

TEST_CASE("ours bound dominated by the shah bound when the premise holds") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int k = 0; k < 20; ++k) {
    TopologySpec spec{TopologyKind::kBanded, 40, 3};
    spec.width = 6;
    const ComparisonSchedule s = generate_schedule(spec);
    const double b = u(rng);
    const ScoreVector w = even_spread_scores(40, b);
    const InstanceSpectrum sp = instance_spectrum(s, w);
    const double n = static_cast<double>(s.total_comparisons());
    const double spread4 = std::pow(std::exp(-b) + std::exp(b), 4);
    if (sp.kappa * sp.laplacian.lambda2 / sp.fisher.lambda2 <= spread4) {
      CHECK(l2_bound_ours(sp.fisher.lambda2, sp.kappa, 40, n, 1.0) <=
            l2_bound_shah(b, sp.laplacian.lambda2, 40, n, 1.0) * (1 + 1e-12));
    }
  }
}

TEST_CASE("existence bound") {
  const double n = 24750.0;
  const ExistenceBound ok = existence_bound(0.25 * 2.0 / 99.0, 100, n);
  CHECK(ok.satisfied);
  CHECK(*ok.failure_prob_bound == doctest::Approx(0.2));

  const ExistenceBound no = existence_bound(1e-6, 100, n);
  CHECK_FALSE(no.satisfied);
  CHECK_FALSE(no.failure_prob_bound.has_value());

  // At the threshold the union bound is 2 [(1 + d^{-3/2})^d - 1].
  const ExistenceBound edge = existence_bound(2.0 * std::log(100.0) / n, 100, n);
  CHECK(edge.satisfied);
  CHECK(edge.union_bound == doctest::Approx(0.2102313954415359).epsilon(1e-12));
}

TEST_CASE("consistency condition") {
  const ConsistencyCondition c = consistency_condition(0.01, 19.0, 20, 3800.0);
  CHECK(c.threshold == doctest::Approx(std::sqrt(19.0 * std::log(20.0)) / 3800.0));
  CHECK(c.satisfied);
  CHECK_FALSE(consistency_condition(1e-6, 19.0, 20, 3800.0).satisfied);
}

TEST_CASE("f and g against high-precision values") {
  CHECK(lemma_g(0.0) == 0.0);
  CHECK(lemma_f(1.7, 0.0) == 0.0);
  CHECK(lemma_g(2.0) == doctest::Approx(0.86756166096605437).epsilon(1e-14));
  CHECK(lemma_g(-2.0) == lemma_g(2.0));
  CHECK(lemma_g(1e-8) == doctest::Approx(2.5e-17).epsilon(1e-12));
  CHECK(lemma_g(50.0) == doctest::Approx(48.613705638880109).epsilon(1e-14));
  CHECK(lemma_f(0.0, 1.0) == doctest::Approx(0.4804580278331101).epsilon(1e-13));
  CHECK(lemma_f(1.5, -2.0) == doctest::Approx(2.7343101557141282).epsilon(1e-13));
  CHECK(lemma_f(-3.0, 0.25) == doctest::Approx(0.033729123492993252).epsilon(1e-12));
  CHECK(lemma_f(10.0, -12.0) == doctest::Approx(46839.960422939045).epsilon(1e-12));
  CHECK(lemma_f(-20.0, 20.0) == doctest::Approx(336290867.69040537).epsilon(1e-12));
  CHECK(lemma_f(0.3, 1e-6) == doctest::Approx(4.9999997518580824e-13).epsilon(1e-8));
  const LemmaValues both = lemma_functions_f_g(1.5, -2.0);
  CHECK(both.g == doctest::Approx(0.86756166096605437));
  CHECK_THROWS_AS(lemma_functions_f_g(NAN, 0.0), ArgumentError);
}

TEST_CASE("f dominates g on a grid") {
  double worst = 1e300;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      const double x = -20.0 + 40.0 * i / 199.0, y = -20.0 + 40.0 * j / 199.0;
      worst = std::min(worst, lemma_f(x, y) - lemma_g(y));
    }
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("curvature constant") {
  const CurvatureConstant c = estimate_curvature_constant();
  CHECK(c.value > 0.0);
  // g / h^2 -> 1 as y -> 0 and increases near the origin.
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(c.argmin == doctest::Approx(1e-6));
  for (double y : {1e-3, 0.5, 4.0, 100.0, 1e5}) {
    CHECK(lemma_g(y) >= c.value * std::pow(proxy_h(y), 2));
  }
  CHECK_THROWS_AS(estimate_curvature_constant(0.0, 1.0, 10), ArgumentError);
}

TEST_CASE("bound reports echo inputs") {
  BoundInputs in;
  in.lambda2_fisher = 1.0 / 198.0;
  in.lambda2_laplacian = 2.0 / 99.0;
  in.kappa = 4.0;
  in.range = 0.0;
  in.d = 100;
  in.n = 24750.0;
  in.t = 1.0;
  const BoundReport ours = report_ours(in);
  CHECK(ours.kind == BoundKind::kOursL2);
  CHECK(ours.value == doctest::Approx(3.2));
  CHECK(ours.inputs.kappa == 4.0);
  const BoundReport shah = report_shah(in);
  CHECK(shah.value == doctest::Approx(16.0 * 99.0 / 2.0 * 100.0 / 24750.0));
  const BoundReport ex = report_existence(in);
  CHECK(ex.satisfied.value());
  CHECK(ex.value == doctest::Approx(0.2));
  CHECK(to_string(BoundKind::kShahL2) == "shah_l2");
  CHECK(ours.value >= 0.0);
}
