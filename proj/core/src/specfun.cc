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

#include "simplexdp/specfun.h"

#include <cmath>
#include <cstddef>
#include <string>

#include "simplexdp/errors.h"

namespace simplexdp {
namespace specfun {
namespace {

void check_positive_finite(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw ValidationError(std::string(fn) + ": argument must be positive and finite, got " +
                          std::to_string(x));
  }
}

// Lanczos approximation, g = 7 with 9 coefficients. The shifted sum is
// well-conditioned for all real x > 0; no reflection path is needed because
// the domain of every caller is the positive half-line.
constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoef[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};
const double kHalfLogTwoPi = 0.5 * std::log(2.0 * 3.14159265358979323846);

// Bernoulli-series tail coefficients for psi: B_{2n}/(2n) over x^{2n},
// through the x^{-12} term.
constexpr double kDigammaTail[6] = {
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0,
};

// Bernoulli-series tail for psi1: B_{2n} over x^{2n+1}, through x^{-13}.
constexpr double kTrigammaTail[6] = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0,
};

// Upward-recurrence threshold; the asymptotic tails above keep the relative
// truncation error below 1e-12 (psi) and 1e-11 (psi1) once x >= 6.
constexpr double kAsymptoticThreshold = 6.0;

}  // namespace

double log_gamma(double x) {
  check_positive_finite(x, "log_gamma");
  // The rational stage loses digits approaching the pole at zero; one
  // recurrence keeps its argument at 1 or above, where the coefficients
  // deliver full double precision.
  if (x < 1.0) return log_gamma(x + 1.0) - std::log(x);
  double sum = kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) {
    sum += kLanczosCoef[i] / (x - 1.0 + static_cast<double>(i));
  }
  const double t = x + kLanczosG - 0.5;
  return kHalfLogTwoPi + (x - 0.5) * std::log(t) - t + std::log(sum);
}

double digamma(double x) {
  check_positive_finite(x, "digamma");
  double acc = 0.0;
  while (x < kAsymptoticThreshold) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double tail = 0.0;
  double p = inv2;
  for (int i = 0; i < 6; ++i) {
    tail += kDigammaTail[i] * p;
    p *= inv2;
  }
  return acc + std::log(x) - 0.5 * inv - tail;
}

double trigamma(double x) {
  check_positive_finite(x, "trigamma");
  double acc = 0.0;
  while (x < kAsymptoticThreshold) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double tail = 0.0;
  double p = inv * inv2;
  for (int i = 0; i < 6; ++i) {
    tail += kTrigammaTail[i] * p;
    p *= inv2;
  }
  return acc + inv + 0.5 * inv2 + tail;
}

double log_beta(double a, double b) {
  check_positive_finite(a, "log_beta");
  check_positive_finite(b, "log_beta");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_multivariate_beta(std::span<const double> y) {
  if (y.size() < 2) {
    throw ValidationError("log_multivariate_beta: need at least 2 entries, got " +
                          std::to_string(y.size()));
  }
  double sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    check_positive_finite(y[i], "log_multivariate_beta");
    sum += y[i];
    acc += log_gamma(y[i]);
  }
  return acc - log_gamma(sum);
}

}  // namespace specfun
}  // namespace simplexdp
