// Copyright 2026 The SimplexDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "simplexdp/dirichlet.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "simplexdp/errors.h"
#include "simplexdp/rng.h"

namespace {

using namespace simplexdp;

CountVector center(std::vector<double> probs) {
  CountVector q;
  q.n = static_cast<int>(probs.size());
  q.N = 100;
  q.eta = *std::min_element(probs.begin(), probs.end());
  q.probs = std::move(probs);
  return q;
}

TEST_SUITE("dirichlet") {

TEST_CASE("parameter validation rejects degenerate centers and concentrations") {
  CHECK_THROWS_AS(DirichletParams::create(center({0.5, 0.5, 0.0}), 10.0), ValidationError);
  CHECK_THROWS_AS(DirichletParams::create(center({0.5, 0.5}), 0.0), ValidationError);
  CHECK_THROWS_AS(DirichletParams::create(center({0.5, 0.5}), -3.0), ValidationError);
  CHECK_THROWS_AS(
      DirichletParams::create(center({0.5, 0.5}), std::numeric_limits<double>::infinity()),
      ValidationError);
  CHECK_THROWS_AS(DirichletParams::create(center({0.6, 0.6, 0.6}), 10.0), ValidationError);
  CountVector single;
  single.probs = {1.0};
  CHECK_THROWS_AS(DirichletParams::create(single, 10.0), ValidationError);
  CHECK_NOTHROW(DirichletParams::create(center({0.5, 0.25, 0.25}), 10.0));
}

TEST_CASE("draws live on the simplex and are bitwise reproducible") {
  const auto params = DirichletParams::create(center({0.2, 0.3, 0.1, 0.4}), 17.0);
  RngStream a(RngSeed{314, 1});
  RngStream b(RngSeed{314, 1});
  for (int i = 0; i < 500; ++i) {
    const auto x = sample(params, a);
    const auto y = sample(params, b);
    CHECK(x == y);
    double sum = 0.0;
    for (double v : x) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("tiny shapes raise NumericError with actionable advice") {
  const auto params = DirichletParams::create(center({1e-14, 0.4, 0.6 - 1e-14}), 1.0);
  RngStream rng(RngSeed{1, 0});
  CHECK_THROWS_WITH_AS(sample(params, rng), doctest::Contains("increase k"), NumericError);
}

TEST_CASE("shapes just above the floor underflow to the boundary nudge") {
  // gamma(2e-12) is exp(ln(u)/2e-12) scaled; for any realistic uniform the
  // draw collapses to zero and the sampler substitutes 1e-300 and counts it.
  const auto params = DirichletParams::create(center({2e-12, 0.5, 0.5 - 2e-12}), 1.0);
  RngStream rng(RngSeed{7, 7});
  DrawDiagnostics diag;
  for (int i = 0; i < 10; ++i) {
    const auto x = sample(params, rng, &diag);
    double sum = 0.0;
    for (double v : x) sum += v;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
  CHECK(diag.boundary_nudges > 0);
}

TEST_CASE("draw mean is the center and variance matches the Dirichlet law") {
  const std::vector<double> p = {0.5, 0.25, 0.25};
  const double k = 50.0;
  const auto params = DirichletParams::create(center(p), k);
  RngStream rng(RngSeed{2026, 5});
  constexpr int kDraws = 100000;
  std::vector<double> sum(3, 0.0);
  std::vector<double> sumsq(3, 0.0);
  for (int d = 0; d < kDraws; ++d) {
    const auto x = sample(params, rng);
    for (int i = 0; i < 3; ++i) {
      sum[i] += x[i];
      sumsq[i] += x[i] * x[i];
    }
  }
  for (int i = 0; i < 3; ++i) {
    CAPTURE(i);
    const double mean = sum[i] / kDraws;
    const double var = sumsq[i] / kDraws - mean * mean;
    const double want_var = p[i] * (1.0 - p[i]) / (k + 1.0);
    // The released draw is unbiased: E[x_i] = p_i.
    CHECK(std::fabs(mean - p[i]) <= 5.0 * std::sqrt(want_var / kDraws));
    CHECK(var == doctest::Approx(want_var).epsilon(0.05));
  }
}

TEST_CASE("large concentration pins draws to the center") {
  const std::vector<double> p = {0.3, 0.3, 0.4};
  const auto params = DirichletParams::create(center(p), 1e6);
  RngStream rng(RngSeed{2026, 6});
  for (int d = 0; d < 1000; ++d) {
    const auto x = sample(params, rng);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::fabs(x[i] - p[i]) < 0.01);
    }
  }
}

TEST_CASE("marginal of the first coordinate passes a KS test against its Beta law") {
  const std::vector<double> p = {0.35, 0.4, 0.25};
  const double k = 12.0;
  const auto params = DirichletParams::create(center(p), k);
  RngStream rng(RngSeed{2026, 7});
  constexpr int kDraws = 100000;
  std::vector<double> first;
  first.reserve(kDraws);
  for (int d = 0; d < kDraws; ++d) first.push_back(sample(params, rng)[0]);
  std::sort(first.begin(), first.end());
  // Aggregation property: x_0 ~ Beta(k p_0, k (1 - p_0)).
  const double a = k * p[0];
  const double b = k * (1.0 - p[0]);
  double ks = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double cdf = simplexdp::oracles::reg_incomplete_beta(a, b, first[static_cast<std::size_t>(i)]);
    ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / kDraws));
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / kDraws - cdf));
  }
  // 0.1% critical value of the Kolmogorov distribution.
  CHECK(ks <= 1.9495 / std::sqrt(static_cast<double>(kDraws)));
}

TEST_CASE("all-shapes-one density is the uniform density on the simplex") {
  // k p_i = 1 for every coordinate makes the law uniform: density (n-1)!.
  const auto params = DirichletParams::create(center({1.0 / 3, 1.0 / 3, 1.0 / 3}), 3.0);
  const std::vector<std::vector<double>> points = {
      {0.2, 0.3, 0.5}, {0.98, 0.01, 0.01}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  for (const auto& x : points) {
    CHECK(log_density(params, x) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("density is symmetric under permutations that fix the center") {
  const auto params = DirichletParams::create(center({0.25, 0.25, 0.5}), 9.0);
  const std::vector<double> x = {0.1, 0.6, 0.3};
  const std::vector<double> x_swapped = {0.6, 0.1, 0.3};
  CHECK(log_density(params, x) == doctest::Approx(log_density(params, x_swapped)).epsilon(1e-12));
}

TEST_CASE("density integrates to one over the simplex") {
  const auto params = DirichletParams::create(center({0.3, 0.3, 0.4}), 10.0);
  // Midpoint rule on the triangle {x1 + x2 < 1}. All shapes exceed one, so
  // the integrand vanishes at the boundary and the rule converges cleanly.
  constexpr int kGrid = 400;
  const double h = 1.0 / kGrid;
  double integral = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double x1 = (i + 0.5) * h;
    for (int j = 0; j < kGrid; ++j) {
      const double x2 = (j + 0.5) * h;
      const double x3 = 1.0 - x1 - x2;
      if (x3 <= 0.0) break;
      const std::vector<double> x = {x1, x2, x3};
      integral += std::exp(log_density(params, x)) * h * h;
    }
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("density rejects off-simplex and mismatched points") {
  const auto params = DirichletParams::create(center({0.3, 0.3, 0.4}), 10.0);
  const std::vector<double> boundary = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(log_density(params, boundary), ValidationError);
  const std::vector<double> short_point = {0.5, 0.5};
  CHECK_THROWS_AS(log_density(params, short_point), ValidationError);
  const std::vector<double> off_sum = {0.5, 0.4, 0.4};
  CHECK_THROWS_AS(log_density(params, off_sum), ValidationError);
}

}  // TEST_SUITE

}  // namespace
