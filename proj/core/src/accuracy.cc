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

#include "simplexdp/accuracy.h"

#include <cmath>
#include <cstddef>
#include <string>

#include "simplexdp/errors.h"
#include "simplexdp/specfun.h"

namespace simplexdp {
namespace {

using specfun::digamma;
using specfun::log_beta;
using specfun::log_gamma;

void check_k(double k) {
  if (!std::isfinite(k) || k <= 0.0) {
    throw ValidationError("accuracy: concentration k must be positive and finite");
  }
}

void check_feasible(std::int64_t N, int n, const char* fn) {
  if (n < 2) throw ValidationError(std::string(fn) + ": need n >= 2");
  if (N < n) {
    throw ValidationError(std::string(fn) + ": N = " + std::to_string(N) +
                          " < n = " + std::to_string(n) +
                          "; no count vector with positive entries exists");
  }
}

double zeta(double x, std::int64_t N, double k) {
  const double Nd = static_cast<double>(N);
  return std::log((x + 1.0) / Nd) - digamma((x + 1.0) * k / Nd);
}

}  // namespace

double expected_kl_exact(std::span<const double> q, double k) {
  check_k(k);
  if (q.size() < 2) throw ValidationError("expected_kl_exact: need at least 2 coordinates");
  const double psi_k = digamma(k);
  double acc = 0.0;
  for (double qi : q) {
    if (!(qi > 0.0)) {
      throw ValidationError("expected_kl_exact: requires a strictly interior count vector");
    }
    acc += qi * (std::log(qi) + psi_k - digamma(k * qi));
  }
  // Non-negative analytically; clamp the rounding residue near k -> inf.
  return acc < 0.0 ? 0.0 : acc;
}

double expected_kl_exact(const CountVector& q, double k) {
  return expected_kl_exact(std::span<const double>(q.probs), k);
}

double expected_kl_bound(std::int64_t N, int n, double k) {
  check_k(k);
  check_feasible(N, n, "expected_kl_bound");
  const double Nd = static_cast<double>(N);
  return (n - 1) / Nd * zeta(0.0, N, k) +
         (Nd - n + 1) / Nd * zeta(static_cast<double>(N - n), N, k) + digamma(k);
}

CoordErrorMoments coord_error_moments(double q_i, double k) {
  check_k(k);
  if (!(q_i > 0.0) || !(q_i < 1.0)) {
    throw ValidationError("coord_error_moments: q_i must lie strictly inside (0, 1)");
  }
  CoordErrorMoments m;
  const double a = k * q_i;
  const double b = k * (1.0 - q_i);
  m.abs_mean = 2.0 * std::exp(a * std::log(q_i) + b * std::log(1.0 - q_i) - std::log(k) -
                              log_beta(a, b));
  m.sq_mean = (q_i - q_i * q_i) / (k + 1.0);
  return m;
}

CoordErrorBounds coord_error_bounds(std::int64_t N, int n, double k) {
  check_k(k);
  check_feasible(N, n, "coord_error_bounds");
  const double Nd = static_cast<double>(N);
  CoordErrorBounds b;
  b.abs_upper = std::exp(log_gamma(k) + (1.0 - k) * std::log(2.0) - 2.0 * log_gamma(k / 2.0) -
                         std::log(k));
  const double lo = 1.0 / Nd;
  const double hi_complement = (n - 1) / Nd;
  b.abs_lower = 2.0 * std::exp(k * (1.0 - hi_complement) * std::log(lo) +
                               k * (1.0 - lo) * std::log(hi_complement) - std::log(k) -
                               log_beta(k * lo, k * hi_complement));
  b.sq_upper = 1.0 / (4.0 * (k + 1.0));
  return b;
}

double markov_expected_kl(const TransitionCounts& tc, std::span<const double> pi,
                          std::span<const double> ks) {
  const std::size_t n = tc.rows.size();
  if (pi.size() != n || ks.size() != n) {
    throw ValidationError("markov_expected_kl: pi and ks must have one entry per row");
  }
  double pi_sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pi[i] >= 0.0)) throw ValidationError("markov_expected_kl: pi must be non-negative");
    pi_sum += pi[i];
    acc += pi[i] * expected_kl_exact(tc.rows[i], ks[i]);
  }
  if (std::abs(pi_sum - 1.0) > 1e-9) {
    throw ValidationError("markov_expected_kl: pi sums to " + std::to_string(pi_sum) +
                          ", expected 1");
  }
  return acc;
}

double markov_kl_bound(std::span<const std::int64_t> Ns, int n, std::span<const double> ks,
                       std::span<const double> pi) {
  const std::size_t rows = pi.size();
  if (Ns.size() != rows || ks.size() != rows) {
    throw ValidationError("markov_kl_bound: Ns, ks and pi must have one entry per row");
  }
  double pi_sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(pi[i] >= 0.0)) throw ValidationError("markov_kl_bound: pi must be non-negative");
    pi_sum += pi[i];
    acc += pi[i] * expected_kl_bound(Ns[i], n, ks[i]);
  }
  if (std::abs(pi_sum - 1.0) > 1e-9) {
    throw ValidationError("markov_kl_bound: pi sums to " + std::to_string(pi_sum) +
                          ", expected 1");
  }
  return acc;
}

double expected_l1_bound(double L) {
  if (!std::isfinite(L) || L < 0.0) {
    throw ValidationError("expected_l1_bound: L must be non-negative, got " + std::to_string(L));
  }
  return std::sqrt(2.0 * L);
}

AccuracyReport analyze_vector(const CountVector& q, double k) {
  AccuracyReport r;
  r.expected_kl_exact = expected_kl_exact(q, k);
  r.expected_kl_bound = expected_kl_bound(q.N, q.n, k);
  const CoordErrorBounds cb = coord_error_bounds(q.N, q.n, k);
  r.coord_abs_error_upper = cb.abs_upper;
  r.coord_abs_error_lower = cb.abs_lower;
  r.coord_sq_error_upper = cb.sq_upper;
  r.coord_abs_error.reserve(q.probs.size());
  r.coord_sq_error.reserve(q.probs.size());
  for (double qi : q.probs) {
    const CoordErrorMoments m = coord_error_moments(qi, k);
    r.coord_abs_error.push_back(m.abs_mean);
    r.coord_sq_error.push_back(m.sq_mean);
  }
  return r;
}

}  // namespace simplexdp
