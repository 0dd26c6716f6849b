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
// Markov-chain analysis: stationary distribution, fundamental matrix,
// infinity-norm ergodicity coefficient, and the perturbation bounds relating
// a chain to its privatized release. Dense direct linear algebra throughout;
// every chain in scope is small.

#ifndef SIMPLEXDP_MARKOV_H_
#define SIMPLEXDP_MARKOV_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simplexdp/data.h"

namespace simplexdp {

// Row-major, row-stochastic.
using Matrix = std::vector<std::vector<double>>;

// Sign convention for the fundamental matrix. The perturbation bound is
// stated with Z = (I - P - 1*pi^T)^{-1}; the classical fundamental matrix
// uses a plus sign. The minus variant is authoritative in reports; the plus
// variant is available opt-in for comparison.
enum class ZSign { kPaper, kClassical };

// Solves pi^T P = pi^T with sum(pi) = 1 by a dense direct solve (one
// equation replaced by the normalization). Residual in the infinity norm is
// at most 1e-10 or the chain is rejected as reducible.
std::vector<double> stationary_distribution(const Matrix& P);

struct FundamentalMatrix {
  Matrix Z;
  double norm1 = 0.0;      // induced 1-norm: max absolute column sum
  double condition = 0.0;  // 1-norm condition estimate of the inverted system
};

// Z = (I - P -/+ 1*pi^T)^{-1}. Throws NumericError when the 1-norm condition
// estimate exceeds 1e12.
FundamentalMatrix fundamental_matrix(const Matrix& P, std::span<const double> pi,
                                     ZSign sign = ZSign::kPaper);

// Infinity-norm ergodicity coefficient: max over zero-sum z with
// ||z||_inf = 1 of ||P^T z||_inf. Computed in closed form per column c as
// (sum of the top floor(n/2) entries) - (sum of the bottom floor(n/2)
// entries); the brute-force oracle below certifies the closed form.
double tau_inf(const Matrix& P);

// Vertex enumeration oracle for tau_inf: every vertex of the feasible set
// has at most one coordinate off the +-1 box, so each coordinate takes a
// turn as the balancer while the others run over sign patterns. n <= 10.
double tau_inf_bruteforce(const Matrix& P);

// A stochastic matrix with its derived quantities and validation flags.
struct TransitionModel {
  Matrix P;
  std::vector<double> pi;
  double tau_inf = 0.0;
  double z_norm1 = 0.0;
  double z_condition = 0.0;
  ZSign z_sign = ZSign::kPaper;
  std::vector<std::string> state_labels;
  ChainDiagnostics diagnostics;
};

TransitionModel build_transition_model(const Matrix& P, std::vector<std::string> state_labels,
                                       ZSign sign = ZSign::kPaper);

struct PerturbationBounds {
  double L = 0.0;         // pi-weighted data-free bound on the expected chain KL
  double tv_bound = 0.0;  // bound on E[TV(pi, pi_tilde)]: 0.5 * ||Z||_1 * sqrt(2L)
  double tau_bound = 0.0; // bound on E|tau_inf(P) - tau_inf(P_tilde)|: sqrt(2L)
};

PerturbationBounds perturbation_bounds(const Matrix& P, std::span<const double> pi,
                                       std::span<const std::int64_t> Ns,
                                       std::span<const double> ks, ZSign sign = ZSign::kPaper);

}  // namespace simplexdp

#endif  // SIMPLEXDP_MARKOV_H_
