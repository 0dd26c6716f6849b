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
// Analytic accuracy functionals for the Dirichlet mechanism. All KL values
// are in nats. The exact expectations depend on the sensitive count vector
// and stay internal to the data custodian; the data-free bounds may be
// quoted publicly, which is why the pair is always reported together.

#ifndef SIMPLEXDP_ACCURACY_H_
#define SIMPLEXDP_ACCURACY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "simplexdp/data.h"

namespace simplexdp {

// E[KL(q || draw)] for draw ~ Dir(k*q): sum_i q_i (ln q_i + psi(k) -
// psi(k*q_i)). Requires a strictly interior q; always >= 0.
double expected_kl_exact(std::span<const double> q, double k);
double expected_kl_exact(const CountVector& q, double k);

// Data-free upper bound on expected_kl_exact over all count vectors of size
// N with positive entries: (n-1)/N zeta(0) + (N-n+1)/N zeta(N-n) + psi(k)
// with zeta(x) = ln((x+1)/N) - psi((x+1)k/N). Equals the exact value at the
// maximizing vector (1/N, ..., 1/N, 1-(n-1)/N).
double expected_kl_bound(std::int64_t N, int n, double k);

struct CoordErrorMoments {
  double abs_mean = 0.0;  // E|q_i - draw_i|
  double sq_mean = 0.0;   // E|q_i - draw_i|^2 = (q_i - q_i^2)/(k+1)
};

CoordErrorMoments coord_error_moments(double q_i, double k);

struct CoordErrorBounds {
  double abs_upper = 0.0;  // Gamma(k) 2^{1-k} / (Gamma(k/2)^2 k)
  double abs_lower = 0.0;  // abs_mean floor over feasible count vectors
  double sq_upper = 0.0;   // 1/(4(k+1)), attained at q_i = 1/2
};

CoordErrorBounds coord_error_bounds(std::int64_t N, int n, double k);

// pi-weighted sum of per-row exact expected KL values for a chain whose row
// i is privatized with concentration ks[i].
double markov_expected_kl(const TransitionCounts& tc, std::span<const double> pi,
                          std::span<const double> ks);

// The quantity L: pi-weighted sum of per-row data-free KL bounds.
double markov_kl_bound(std::span<const std::int64_t> Ns, int n, std::span<const double> ks,
                       std::span<const double> pi);

// E||P - P_tilde||_1 <= sqrt(2L) (induced 1-norm).
double expected_l1_bound(double L);

struct AccuracyReport {
  double expected_kl_exact = 0.0;
  double expected_kl_bound = 0.0;
  std::vector<double> coord_abs_error;
  double coord_abs_error_upper = 0.0;
  double coord_abs_error_lower = 0.0;
  std::vector<double> coord_sq_error;
  double coord_sq_error_upper = 0.0;
};

AccuracyReport analyze_vector(const CountVector& q, double k);

}  // namespace simplexdp

#endif  // SIMPLEXDP_ACCURACY_H_
