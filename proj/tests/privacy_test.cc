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

#include "simplexdp/privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "simplexdp/data.h"
#include "simplexdp/errors.h"
#include "simplexdp/rng.h"

namespace {

using namespace simplexdp;
namespace orc = simplexdp::oracles;

// The worked grading example: five letter grades over 98 students, eta from
// the smallest class (8/98 rounded down to 0.073 keeps slack).
constexpr double kGradeEta = 0.073;
constexpr double kGradeGamma = 0.0004;
constexpr std::int64_t kGradeN = 98;
constexpr int kGradeCats = 5;

MechanismConfig grade_config(double k = 20.6) {
  return MechanismConfig::validated(k, kGradeEta, kGradeGamma, kGradeN, kGradeCats);
}

CountVector cv(std::vector<double> probs, std::int64_t N, double eta) {
  CountVector q;
  q.n = static_cast<int>(probs.size());
  q.N = N;
  q.eta = eta;
  q.probs = std::move(probs);
  return q;
}

CountVector counts_to_cv(const std::vector<int>& counts) {
  std::int64_t N = 0;
  for (int c : counts) N += c;
  std::vector<double> probs;
  int min_count = counts[0];
  for (int c : counts) {
    probs.push_back(static_cast<double>(c) / static_cast<double>(N));
    min_count = std::min(min_count, c);
  }
  return cv(std::move(probs), N, static_cast<double>(min_count) / static_cast<double>(N));
}

// The certified epsilon recomputed in long double, straight from its
// definition, as an independent oracle.
double epsilon_oracle(const MechanismConfig& c) {
  const long double k = c.k;
  const long double eta = c.eta;
  const long double N = static_cast<long double>(c.N);
  const long double gamma = c.gamma;
  const long double term1 = orc::log_beta(k * eta, k * (1.0L - 2.0L * eta)) -
                            orc::log_beta(k * (eta + 1.0L / N), k * (1.0L - 2.0L * eta - 1.0L / N));
  const long double term2 =
      (k / N) * (std::log(1.0L - static_cast<long double>(c.n - 1) * gamma) - std::log(gamma));
  return static_cast<double>(term1 + term2);
}

template <typename E, typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

TEST_SUITE("privacy") {

TEST_CASE("config validation names the violated constraint") {
  CHECK_NOTHROW(grade_config());
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, 0.0, kGradeGamma, kGradeN, kGradeCats);
        }).find("eta") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, 0.25, kGradeGamma, kGradeN, kGradeCats);
        }).find("eta") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, 0.3, kGradeGamma, kGradeN, kGradeCats);
        }).find("eta") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, kGradeEta, 0.0, kGradeN, kGradeCats);
        }).find("gamma") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, kGradeEta, 0.26, kGradeN, kGradeCats);
        }).find("gamma") != std::string::npos);
  // gamma exactly at the cap 1/(n-1) is admissible.
  CHECK_NOTHROW(MechanismConfig::validated(20.6, kGradeEta, 0.25, kGradeN, kGradeCats));
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(10.0, kGradeEta, kGradeGamma, kGradeN, kGradeCats);
        }).find("3/(2*eta)") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, kGradeEta, kGradeGamma, 0, kGradeCats);
        }).find("N") != std::string::npos);
  CHECK(message_of<ValidationError>([] {
          MechanismConfig::validated(20.6, kGradeEta, kGradeGamma, kGradeN, 2);
        }).find("n") != std::string::npos);
  // k exactly at the minimum is admissible.
  CHECK_NOTHROW(MechanismConfig::validated(min_k(kGradeEta), kGradeEta, kGradeGamma, kGradeN,
                                           kGradeCats));
}

TEST_CASE("min_k is 3/(2 eta) on its open domain") {
  CHECK(min_k(kGradeEta) == doctest::Approx(20.547945205479452).epsilon(1e-14));
  CHECK(min_k(0.1) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(min_k(0.24999) > 6.0);
  CHECK_THROWS_AS(min_k(0.0), ValidationError);
  CHECK_THROWS_AS(min_k(0.25), ValidationError);
  CHECK_THROWS_AS(min_k(-0.1), ValidationError);
}

TEST_CASE("epsilon matches the worked example and its long-double restatement") {
  const double eps = epsilon_bound(grade_config());
  // Reported budget for the grading example.
  CHECK(eps == doctest::Approx(2.255).epsilon(0.05 / 2.255));
  CHECK(std::fabs(eps - 2.211908) <= 1e-5);
  CHECK(std::fabs(eps - epsilon_oracle(grade_config())) <= 1e-9);
}

TEST_CASE("epsilon agrees with the long-double oracle across random configs") {
  std::mt19937_64 gen(20260401);
  std::uniform_real_distribution<double> eta_dist(0.02, 0.24);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> n_dist(3, 12);
  std::uniform_int_distribution<std::int64_t> big_n(20, 100000);
  for (int trial = 0; trial < 200; ++trial) {
    const double eta = eta_dist(gen);
    const int n = static_cast<int>(n_dist(gen));
    const double gamma_cap = 1.0 / (n - 1);
    const double gamma = gamma_cap * std::pow(10.0, -4.0 * unif(gen)) * 0.999;
    const std::int64_t N = big_n(gen);
    const double mk = min_k(eta);
    const double k = mk * (1.0 + 9.0 * unif(gen));  // up to 10x the minimum
    if (k > 200.0) continue;                        // keep Beta magnitudes tame
    const auto cfg = MechanismConfig::validated(k, eta, gamma, N, n);
    const double want = epsilon_oracle(cfg);
    CAPTURE(k);
    CAPTURE(eta);
    CAPTURE(gamma);
    CAPTURE(N);
    CAPTURE(n);
    CHECK(std::fabs(epsilon_bound(cfg) - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("epsilon needs room on the count grid and an interior bad-set cap") {
  // 1 - 2*eta - 1/N must stay positive: eta near 1/4 with N = 1 fails.
  CHECK_THROWS_AS(epsilon_bound(MechanismConfig::validated(1000.0, 0.2499, 0.1, 1, 3)),
                  ValidationError);
  // gamma exactly at 1/(n-1) zeroes the interior mass 1-(n-1)*gamma.
  CHECK_THROWS_AS(epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, 0.25, kGradeN, 5)),
                  ValidationError);
}

TEST_CASE("epsilon grows with k and shrinks with N and gamma") {
  double prev = epsilon_bound(grade_config(20.6));
  for (int i = 1; i <= 40; ++i) {
    const double k = 20.6 * std::pow(1.25, i);
    const double cur = epsilon_bound(grade_config(k));
    CHECK(cur > prev);
    prev = cur;
  }
  prev = epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, kGradeGamma, 50, kGradeCats));
  for (const std::int64_t N : {100, 200, 500, 1000, 10000, 100000, 1000000}) {
    const double cur =
        epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, kGradeGamma, N, kGradeCats));
    CHECK(cur < prev);
    prev = cur;
  }
  // Very large N drives the certified loss toward zero.
  CHECK(epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, kGradeGamma, 1000000000,
                                                 kGradeCats)) < 1e-6);
  prev = epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, 1e-6, kGradeN, kGradeCats));
  for (const double gamma : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.2}) {
    const double cur =
        epsilon_bound(MechanismConfig::validated(20.6, kGradeEta, gamma, kGradeN, kGradeCats));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("min_epsilon is the bound evaluated at the smallest admissible k") {
  const double direct = epsilon_bound(MechanismConfig::validated(
      min_k(kGradeEta), kGradeEta, kGradeGamma, kGradeN, kGradeCats));
  const double reported = min_epsilon(kGradeEta, kGradeGamma, kGradeN, kGradeCats);
  CHECK(std::fabs(reported - direct) <= 1e-12);
  CHECK(reported == doctest::Approx(2.2065002365682305).epsilon(1e-12));
}

TEST_CASE("calibration reproduces the grading example and round-trips") {
  const double k = calibrate_k(3.31, kGradeEta, kGradeGamma, kGradeN, kGradeCats);
  CHECK(std::fabs(k - 31.1613385374) <= 1e-6);
  CHECK(std::fabs(epsilon_bound(grade_config(k)) - 3.31) <= 2e-9);

  std::mt19937_64 gen(20260402);
  std::uniform_real_distribution<double> eta_dist(0.03, 0.22);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> n_dist(3, 8);
  std::uniform_int_distribution<std::int64_t> big_n(30, 5000);
  for (int trial = 0; trial < 100; ++trial) {
    const double eta = eta_dist(gen);
    const int n = static_cast<int>(n_dist(gen));
    const double gamma = (1.0 / (n - 1)) * std::pow(10.0, -3.0 * unif(gen)) * 0.99;
    const std::int64_t N = big_n(gen);
    const double k_true = min_k(eta) * (1.0001 + 50.0 * unif(gen));
    const double target =
        epsilon_bound(MechanismConfig::validated(k_true, eta, gamma, N, n));
    const double k_hat = calibrate_k(target, eta, gamma, N, n);
    CAPTURE(eta);
    CAPTURE(gamma);
    CAPTURE(N);
    CAPTURE(n);
    CAPTURE(k_true);
    CHECK(k_hat >= min_k(eta) * (1.0 - 1e-12));
    const double achieved = epsilon_bound(MechanismConfig::validated(k_hat, eta, gamma, N, n));
    CHECK(std::fabs(achieved - target) <= 2e-9);
  }
}

TEST_CASE("calibration reports the reachable minimum for hopeless targets") {
  const double floor_eps = min_epsilon(kGradeEta, kGradeGamma, kGradeN, kGradeCats);
  const auto msg = message_of<CalibrationError>(
      [&] { calibrate_k(floor_eps * 0.5, kGradeEta, kGradeGamma, kGradeN, kGradeCats); });
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find("minimum") != std::string::npos);
  // Exactly the minimum is reachable: it calibrates to min_k.
  const double k = calibrate_k(floor_eps, kGradeEta, kGradeGamma, kGradeN, kGradeCats);
  CHECK(std::fabs(k - min_k(kGradeEta)) <= 1e-6 * min_k(kGradeEta));
}

TEST_CASE("bad-set probability hits its two degenerate limits") {
  const auto q = counts_to_cv({33, 33, 33});
  // gamma so small every draw clears it: the bad set is empty.
  const auto cfg_tiny =
      MechanismConfig::validated(20.0, 0.1, 1e-300, 99, 3);
  RngStream rng1(RngSeed{11, 0});
  const auto tiny = omega1_probability_mc(q, cfg_tiny, 10000, rng1);
  CHECK(tiny.estimate >= 0.9999);
  // gamma = 0.45 with n = 3 is admissible but unsatisfiable: coordinates
  // summing to one cannot all reach 0.45.
  const auto cfg_big = MechanismConfig::validated(20.0, 0.1, 0.45, 99, 3);
  RngStream rng2(RngSeed{11, 1});
  const auto none = omega1_probability_mc(q, cfg_big, 10000, rng2);
  CHECK(none.estimate == 0.0);
}

TEST_CASE("bad-set probability agrees between sampler and quadrature") {
  std::mt19937_64 gen(20260403);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int c1 = 10 + static_cast<int>(unif(gen) * 69.0);
    const int c2 = 10 + static_cast<int>(unif(gen) * static_cast<double>(79 - c1));
    const int c3 = 99 - c1 - c2;
    const auto q = counts_to_cv({c1, c2, c3});
    const double k = 15.0 * (1.0 + 2.0 * unif(gen));
    const double gamma = 0.02 + 0.28 * unif(gen);
    const auto cfg = MechanismConfig::validated(k, 0.1, gamma, 99, 3);
    RngStream rng(RngSeed{500 + static_cast<std::uint64_t>(trial), 0});
    const auto mc = omega1_probability_mc(q, cfg, 50000, rng);
    const double quad = omega1_probability_quadrature(q, cfg);
    CAPTURE(c1);
    CAPTURE(c2);
    CAPTURE(k);
    CAPTURE(gamma);
    // The plug-in std error vanishes when no draw crosses gamma; widen it
    // with a boundary-safe proportion so rare-event configs stay testable.
    const double p_safe = (mc.estimate * 50000.0 + 2.0) / 50004.0;
    const double se_safe = std::sqrt(p_safe * (1.0 - p_safe) / 50000.0);
    CHECK(std::fabs(mc.estimate - quad) <= 3.0 * se_safe + 2e-6);
  }
}

TEST_CASE("four-coordinate quadrature agrees with the sampler") {
  std::mt19937_64 gen(20260404);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const int c1 = 15 + static_cast<int>(unif(gen) * 25.0);
    const int c2 = 15 + static_cast<int>(unif(gen) * 20.0);
    const int c3 = 15 + static_cast<int>(unif(gen) * 15.0);
    const int c4 = 120 - c1 - c2 - c3;  // >= 18 by construction
    const auto q = counts_to_cv({c1, c2, c3, c4});
    const double k = 14.0 + 10.0 * unif(gen);
    const double gamma = 0.02 + 0.2 * unif(gen);
    const auto cfg = MechanismConfig::validated(k, 0.11, gamma, 120, 4);
    RngStream rng(RngSeed{600 + static_cast<std::uint64_t>(trial), 0});
    const auto mc = omega1_probability_mc(q, cfg, 50000, rng);
    const double quad = omega1_probability_quadrature(q, cfg);
    CAPTURE(k);
    CAPTURE(gamma);
    CHECK(std::fabs(mc.estimate - quad) <= 3.0 * mc.std_error + 2e-6);
  }
}

TEST_CASE("uniform all-ones concentration turns quadrature into triangle area") {
  // k q_i = 1 for all i: the draw is uniform on the simplex, and the good
  // region is a shrunken triangle of relative area (1 - 3 gamma)^2.
  const auto q = counts_to_cv({33, 33, 33});
  for (const double gamma : {0.05, 0.15, 0.3}) {
    MechanismConfig cfg{3.0, 0.1, gamma, 99, 3};  // k below min_k: oracle-only use
    const double want = (1.0 - 3.0 * gamma) * (1.0 - 3.0 * gamma);
    CHECK(std::fabs(omega1_probability_quadrature(q, cfg) - want) <= 1e-6);
  }
  MechanismConfig wide{3.0, 0.1, 1e-12, 99, 3};
  CHECK(std::fabs(omega1_probability_quadrature(q, wide) - 1.0) <= 1e-6);
}

TEST_CASE("quadrature is an oracle for three and four coordinates only") {
  const auto q5 = counts_to_cv({20, 20, 20, 20, 20});
  MechanismConfig cfg{20.0, 0.1, 0.01, 100, 5};
  CHECK_THROWS_AS(omega1_probability_quadrature(q5, cfg), ValidationError);
}

TEST_CASE("sampler enforces admission, dimensions, and a sample floor") {
  const auto q = counts_to_cv({33, 33, 33});
  const auto cfg = MechanismConfig::validated(20.0, 0.1, 0.01, 99, 3);
  RngStream rng(RngSeed{1, 2});
  CHECK_THROWS_AS(omega1_probability_mc(q, cfg, 999, rng), ValidationError);
  // Count vector with a coordinate below eta is not admitted.
  const auto low = counts_to_cv({5, 47, 47});
  CHECK_THROWS_AS(omega1_probability_mc(low, cfg, 10000, rng), AdmissionError);
  // Mismatched N.
  const auto other_n = counts_to_cv({34, 33, 33});
  CHECK_THROWS_AS(omega1_probability_mc(other_n, cfg, 10000, rng), ValidationError);
}

TEST_CASE("sampler estimates do not depend on the worker count") {
  const auto q = counts_to_cv({40, 29, 30});
  const auto cfg = MechanismConfig::validated(18.0, 0.1, 0.08, 99, 3);
  setenv("SIMPLEXDP_THREADS", "1", 1);
  RngStream rng1(RngSeed{77, 0});
  const auto serial = omega1_probability_mc(q, cfg, 200000, rng1);
  setenv("SIMPLEXDP_THREADS", "7", 1);
  RngStream rng7(RngSeed{77, 0});
  const auto parallel = omega1_probability_mc(q, cfg, 200000, rng7);
  unsetenv("SIMPLEXDP_THREADS");
  CHECK(serial.estimate == parallel.estimate);
  CHECK(serial.std_error == parallel.std_error);
}

TEST_CASE("worker count follows the environment override") {
  setenv("SIMPLEXDP_THREADS", "5", 1);
  CHECK(mc_worker_count() == 5);
  setenv("SIMPLEXDP_THREADS", "0", 1);
  CHECK(mc_worker_count() == 1);
  setenv("SIMPLEXDP_THREADS", "100000", 1);
  CHECK(mc_worker_count() == 256);
  unsetenv("SIMPLEXDP_THREADS");
  CHECK(mc_worker_count() >= 1);
}

TEST_CASE("extreme count vectors tile the bordered grid corners") {
  const auto points = delta_extreme_points(grade_config());
  REQUIRE(points.size() == 5);
  // Border count floor(98 * 0.073) = 7; peak 98 - 4*7 = 70.
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    CHECK(p.N == kGradeN);
    CHECK(p.n == kGradeCats);
    double sum = 0.0;
    for (std::size_t j = 0; j < p.probs.size(); ++j) {
      sum += p.probs[j];
      const double want = (i == j) ? 70.0 / 98.0 : 7.0 / 98.0;
      CHECK(p.probs[j] == doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.eta == doctest::Approx(7.0 / 98.0).epsilon(1e-14));
  }
}

TEST_CASE("extreme points require room on the count grid") {
  // N = 4 with n = 5: even one count per border cell exceeds the total.
  const auto msg = message_of<ValidationError>(
      [] { delta_extreme_points(MechanismConfig::validated(100.0, 0.015, 0.01, 4, 5)); });
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find("no room") != std::string::npos);
}

TEST_CASE("delta matches the worked example band and reports its machinery") {
  RngStream rng(RngSeed{20260405, 0});
  const auto budget = delta_bound(grade_config(), 200000, rng);
  CHECK(budget.method == BudgetMethod::kMonteCarloDelta);
  REQUIRE(budget.mc_std_error.has_value());
  // Published band [0.0021, 0.0031] widened by Monte-Carlo noise at 2e5.
  const double slack = 5.0 * *budget.mc_std_error;
  CHECK(budget.delta >= 0.0021 - slack);
  CHECK(budget.delta <= 0.0031 + slack);
  CHECK(budget.epsilon == epsilon_bound(grade_config()));
  CHECK(budget.delta >= 0.0);
  CHECK(budget.delta < 0.5);
}

TEST_CASE("delta is deterministic in the seed and free of gamma mass when gamma is tiny") {
  RngStream a(RngSeed{9, 9});
  RngStream b(RngSeed{9, 9});
  const auto ba = delta_bound(grade_config(), 10000, a);
  const auto bb = delta_bound(grade_config(), 10000, b);
  CHECK(ba.delta == bb.delta);

  const auto cfg = MechanismConfig::validated(20.6, kGradeEta, 1e-300, kGradeN, kGradeCats);
  RngStream c(RngSeed{9, 10});
  CHECK(delta_bound(cfg, 10000, c).delta <= 1e-6);
}

TEST_CASE("delta decreases as concentration grows") {
  RngStream a(RngSeed{13, 0});
  RngStream b(RngSeed{13, 1});
  const auto lo = delta_bound(grade_config(20.6), 50000, a);
  const auto hi = delta_bound(grade_config(41.2), 50000, b);
  CHECK(hi.delta <= lo.delta + 3.0 * (*lo.mc_std_error + *hi.mc_std_error));
}

TEST_CASE("delta of one half or more is rejected as uncertifiable") {
  // gamma = 0.45 with n = 3 makes the good set empty, so delta = 1.
  const auto cfg = MechanismConfig::validated(15.0, 0.1, 0.45, 60, 3);
  RngStream rng(RngSeed{14, 0});
  const auto msg = message_of<ValidationError>([&] { delta_bound(cfg, 1000, rng); });
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find("relax gamma") != std::string::npos);
}

TEST_CASE("delta agrees with quadrature over the same extreme point") {
  const auto cfg = MechanismConfig::validated(15.0, 0.1, 0.0067, 60, 3);
  RngStream rng(RngSeed{15, 0});
  const auto budget = delta_bound(cfg, 200000, rng);
  const auto points = delta_extreme_points(cfg);
  const double quad = omega1_probability_quadrature(points.front(), cfg);
  CHECK(std::fabs(budget.delta - (1.0 - quad)) <= 3.0 * *budget.mc_std_error + 1e-5);
}

TEST_CASE("parallel composition takes the coordinatewise worst case") {
  PrivacyBudget a{1.0, 0.10, BudgetMethod::kMonteCarloDelta, 0.01};
  PrivacyBudget b{2.0, 0.05, BudgetMethod::kMonteCarloDelta, 0.002};
  const std::vector<PrivacyBudget> both = {a, b};
  const auto c = compose_parallel(both);
  CHECK(c.epsilon == 2.0);
  CHECK(c.delta == 0.10);
  CHECK(c.method == BudgetMethod::kComposed);
  // The standard error travels with whichever delta won.
  REQUIRE(c.mc_std_error.has_value());
  CHECK(*c.mc_std_error == 0.01);

  const std::vector<PrivacyBudget> reversed = {b, a};
  const auto d = compose_parallel(reversed);
  CHECK(d.epsilon == c.epsilon);
  CHECK(d.delta == c.delta);

  const std::vector<PrivacyBudget> just_one = {a};
  const auto single = compose_parallel(just_one);
  CHECK(single.epsilon == a.epsilon);
  CHECK(single.delta == a.delta);

  for (const auto& part : both) {
    CHECK(c.epsilon >= part.epsilon);
    CHECK(c.delta >= part.delta);
  }
  CHECK_THROWS_AS(compose_parallel({}), ValidationError);
}

TEST_CASE("vector privatization releases a reproducible simplex point") {
  const auto q = counts_to_cv({23, 33, 26, 8, 8});
  const auto cfg = grade_config();
  RngStream a(RngSeed{2026, 0});
  RngStream b(RngSeed{2026, 0});
  const auto ra = privatize_vector(q, cfg, 10000, a);
  const auto rb = privatize_vector(q, cfg, 10000, b);
  CHECK(ra.private_vector == rb.private_vector);
  CHECK(ra.budget.delta == rb.budget.delta);
  double sum = 0.0;
  for (double v : ra.private_vector) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(std::fabs(sum - 1.0) <= 1e-12);
  CHECK(ra.budget.method == BudgetMethod::kMonteCarloDelta);
  CHECK(ra.budget.epsilon == epsilon_bound(cfg));

  // The released draw must not depend on how hard the delta estimator works.
  RngStream c(RngSeed{2026, 0});
  const auto rc = privatize_vector(q, cfg, 50000, c);
  CHECK(rc.private_vector == ra.private_vector);
}

TEST_CASE("vector privatization rejects unadmitted and mismatched inputs") {
  const auto cfg = grade_config();
  RngStream rng(RngSeed{3, 3});
  const auto low = counts_to_cv({2, 54, 26, 8, 8});  // min entry below eta
  CHECK_THROWS_AS(privatize_vector(low, cfg, 10000, rng), AdmissionError);
  const auto wrong_n = counts_to_cv({30, 30, 38});
  CHECK_THROWS_AS(privatize_vector(wrong_n, cfg, 10000, rng), ValidationError);
}

TEST_CASE("chain privatization composes the worst row budget exactly") {
  TransitionCounts tc;
  tc.state_labels = CategorySet::create({"a", "b", "c"});
  tc.rows.push_back(counts_to_cv({30, 40, 30}));
  tc.rows.push_back(counts_to_cv({25, 50, 25}));
  tc.rows.push_back(counts_to_cv({20, 20, 60}));
  // Different k per row gives distinct row budgets.
  std::vector<MechanismConfig> cfgs = {
      MechanismConfig::validated(16.0, 0.1, 0.01, 100, 3),
      MechanismConfig::validated(24.0, 0.1, 0.01, 100, 3),
      MechanismConfig::validated(32.0, 0.1, 0.01, 100, 3),
  };
  RngStream rng(RngSeed{404, 0});
  const auto result = privatize_chain(tc, cfgs, 20000, rng);
  REQUIRE(result.row_budgets.size() == 3);
  double max_eps = 0.0;
  double max_delta = 0.0;
  for (const auto& rb : result.row_budgets) {
    max_eps = std::max(max_eps, rb.epsilon);
    max_delta = std::max(max_delta, rb.delta);
  }
  CHECK(result.budget.epsilon == max_eps);
  CHECK(result.budget.delta == max_delta);
  CHECK(result.budget.method == BudgetMethod::kComposed);

  // Rows are stochastic and the derived model is populated.
  for (const auto& row : result.model.P) {
    double sum = 0.0;
    for (double v : row) sum += v;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
  CHECK(result.model.pi.size() == 3);
  CHECK(result.model.tau_inf >= 0.0);
  CHECK(result.model.z_norm1 > 0.0);

  // Determinism across identical seeds.
  RngStream rng2(RngSeed{404, 0});
  const auto again = privatize_chain(tc, cfgs, 20000, rng2);
  CHECK(again.model.P == result.model.P);
  CHECK(again.budget.delta == result.budget.delta);
}

TEST_CASE("chain privatization surfaces structural and admission failures") {
  TransitionCounts reducible;
  reducible.state_labels = CategorySet::create({"a", "b", "c"});
  reducible.rows.push_back(cv({0.5, 0.5, 0.0}, 100, 0.0));
  reducible.rows.push_back(cv({0.5, 0.5, 0.0}, 100, 0.0));
  reducible.rows.push_back(cv({0.0, 0.0, 1.0}, 100, 0.0));
  std::vector<MechanismConfig> cfgs(3, MechanismConfig::validated(16.0, 0.1, 0.01, 100, 3));
  RngStream rng(RngSeed{405, 0});
  CHECK_THROWS_AS(privatize_chain(reducible, cfgs, 10000, rng), StructureError);

  TransitionCounts tc;
  tc.state_labels = CategorySet::create({"a", "b", "c"});
  tc.rows.push_back(counts_to_cv({30, 40, 30}));
  tc.rows.push_back(counts_to_cv({5, 70, 25}));  // row 'b' has min entry 0.05 < eta
  tc.rows.push_back(counts_to_cv({20, 20, 60}));
  const auto msg =
      message_of<AdmissionError>([&] { privatize_chain(tc, cfgs, 10000, rng); });
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find("'b'") != std::string::npos);

  const std::vector<MechanismConfig> two(2, cfgs[0]);
  CHECK_THROWS_AS(privatize_chain(tc, two, 10000, rng), ValidationError);
}

}  // TEST_SUITE

}  // namespace
