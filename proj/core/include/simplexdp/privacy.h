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
// Privacy accounting and enforcement for the Dirichlet mechanism: the
// certified epsilon, the Monte-Carlo delta with its quadrature oracle,
// concentration calibration, parallel composition over disjoint partitions,
// and the vector/chain privatization entry points.

#ifndef SIMPLEXDP_PRIVACY_H_
#define SIMPLEXDP_PRIVACY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simplexdp/data.h"
#include "simplexdp/dirichlet.h"
#include "simplexdp/markov.h"
#include "simplexdp/rng.h"

namespace simplexdp {

// Per-query privacy knobs. Invariants: eta in (0, 1/4), gamma in
// (0, 1/(n-1)], k >= 3/(2*eta), N >= 1, n >= 3.
struct MechanismConfig {
  double k = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  std::int64_t N = 0;
  int n = 0;

  // Validates every invariant and names the violated constraint on failure.
  static MechanismConfig validated(double k, double eta, double gamma, std::int64_t N, int n);
};

enum class BudgetMethod { kClosedFormEpsilon, kMonteCarloDelta, kQuadratureDelta, kComposed };

const char* budget_method_name(BudgetMethod method);

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;  // always in [0, 1/2)
  BudgetMethod method = BudgetMethod::kClosedFormEpsilon;
  std::optional<double> mc_std_error;
};

// Smallest admissible concentration, 3/(2*eta). eta must lie in (0, 1/4).
double min_k(double eta);

// The certified epsilon:
//   ln[ B(k*eta, k(1-2*eta)) / B(k(eta+1/N), k(1-2*eta-1/N)) ]
//     + (k/N) ln[ (1-(n-1)*gamma) / gamma ],
// computed entirely through log-space Beta calls. Requires
// 1 - 2*eta - 1/N > 0 and gamma strictly below 1/(n-1).
double epsilon_bound(const MechanismConfig& cfg);

// epsilon_bound at k = min_k(eta): the smallest certifiable epsilon.
double min_epsilon(double eta, double gamma, std::int64_t N, int n);

// Finds k >= min_k(eta) with |epsilon_bound(k) - target| <= 1e-9 by
// verified-monotone bracketing plus bisection. A target below the minimum
// certifiable epsilon raises CalibrationError reporting that minimum.
double calibrate_k(double target_epsilon, double eta, double gamma, std::int64_t N, int n);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Fraction of `samples` draws from Dir(k*q) with every coordinate >= gamma.
// Work is split into fixed-size blocks, one addressed substream per block,
// so the estimate is identical for any worker count. Requires q admitted to
// the bordered simplex of cfg and samples >= 1000.
McEstimate omega1_probability_mc(const CountVector& q, const MechanismConfig& cfg,
                                 std::int64_t samples, RngStream& rng);

// Nested adaptive-Simpson integration of the Dir(k*q) density over
// {x : x_i >= gamma for all i}, n in {3, 4}; absolute error target 1e-6.
double omega1_probability_quadrature(const CountVector& q, const MechanismConfig& cfg);

// Extreme count vectors at which delta_bound evaluates the bad-set mass: all
// n placements of one coordinate at the maximum feasible count with the
// others at the border count. Exposed so tests can integrate the same
// points. Throws when the eta border leaves no room on the 1/N grid.
std::vector<CountVector> delta_extreme_points(const MechanismConfig& cfg);

// delta = 1 - min over extreme count vectors of the Omega_1 probability,
// estimated with `samples` draws per point. Uniform gamma makes the extreme
// points exchangeable, so one representative is evaluated in full and a
// second placement is spot-checked for symmetry.
PrivacyBudget delta_bound(const MechanismConfig& cfg, std::int64_t samples, RngStream& rng);

// Parallel composition across disjoint partitions: (max eps_i, max delta_i).
PrivacyBudget compose_parallel(std::span<const PrivacyBudget> budgets);

struct VectorPrivatization {
  std::vector<double> private_vector;
  PrivacyBudget budget;
  DrawDiagnostics diagnostics;
};

// Releases one Dir(k*q) draw with its certified budget. q must be admitted
// to the bordered simplex of cfg and share its N and n.
VectorPrivatization privatize_vector(const CountVector& q, const MechanismConfig& cfg,
                                     std::int64_t samples, RngStream& rng);

struct ChainPrivatization {
  TransitionModel model;  // the privatized chain and its derived quantities
  PrivacyBudget budget;   // parallel composition of the row budgets
  std::vector<PrivacyBudget> row_budgets;
  DrawDiagnostics diagnostics;
};

// Privatizes each transition row independently under its own config and
// composes the budget. Rows are drawn from per-row addressed substreams.
ChainPrivatization privatize_chain(const TransitionCounts& tc,
                                   std::span<const MechanismConfig> cfgs, std::int64_t samples,
                                   RngStream& rng, ZSign z_sign = ZSign::kPaper);

// Worker cap for Monte-Carlo loops: SIMPLEXDP_THREADS when set, otherwise a
// hardware-based default. Affects speed only, never results.
int mc_worker_count();

}  // namespace simplexdp

#endif  // SIMPLEXDP_PRIVACY_H_
