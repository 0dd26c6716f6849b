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
//
// Independent numeric oracles for the test suites. Everything here is
// implemented from different formulas or higher precision than the library
// under test: long-double Stirling series for the gamma family, direct
// summation for trigamma, a continued fraction for the regularized
// incomplete Beta, and power iteration for stationary distributions.

#ifndef SIMPLEXDP_TESTS_ORACLES_H_
#define SIMPLEXDP_TESTS_ORACLES_H_

#include <vector>

namespace simplexdp::oracles {

// ln Gamma via upward recurrence to x >= 32 and a Stirling tail with
// Bernoulli terms through B20. Long-double arithmetic throughout keeps the
// oracle a couple of digits ahead of the double-precision implementation.
long double log_gamma(long double x);

// Digamma via recurrence to x >= 100 and the asymptotic series through B16.
long double digamma(long double x);

// Trigamma by direct summation of 1e6 terms of sum 1/(x+m)^2 plus an
// Euler-Maclaurin tail correction.
long double trigamma(long double x);

long double log_beta(long double a, long double b);

// Regularized incomplete Beta I_x(a, b) by the standard continued fraction.
double reg_incomplete_beta(double a, double b, double x);

// Stationary distribution by plain power iteration from the uniform start.
std::vector<double> power_iteration(const std::vector<std::vector<double>>& P, int max_iters,
                                    double tol);

}  // namespace simplexdp::oracles

#endif  // SIMPLEXDP_TESTS_ORACLES_H_
