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

#include "simplexdp/markov.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "simplexdp/accuracy.h"
#include "simplexdp/errors.h"

namespace simplexdp {
namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kResidualTol = 1e-10;
constexpr double kConditionLimit = 1e12;

void check_stochastic(const Matrix& P, const char* fn) {
  const std::size_t n = P.size();
  if (n < 2) throw ValidationError(std::string(fn) + ": need at least a 2-state chain");
  for (std::size_t i = 0; i < n; ++i) {
    if (P[i].size() != n) {
      throw ValidationError(std::string(fn) + ": row " + std::to_string(i) + " has " +
                            std::to_string(P[i].size()) + " entries in an n = " +
                            std::to_string(n) + " matrix");
    }
    double sum = 0.0;
    for (double p : P[i]) {
      if (!(p >= -1e-12) || !std::isfinite(p)) {
        throw ValidationError(std::string(fn) + ": negative or non-finite entry in row " +
                              std::to_string(i));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw ValidationError(std::string(fn) + ": row " + std::to_string(i) + " sums to " +
                            std::to_string(sum) + ", expected 1");
    }
  }
}

Eigen::MatrixXd to_eigen(const Matrix& P) {
  const auto n = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = P[i][j];
  }
  return M;
}

double norm1(const Eigen::MatrixXd& M) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) best = std::max(best, M.col(j).cwiseAbs().sum());
  return best;
}

// max over zero-sum z in the unit infinity ball of c^T z: with the sum
// constraint, the optimum puts +1 on the largest floor(n/2) entries and -1
// on the smallest floor(n/2), leaving the median coordinate at 0 for odd n.
double column_spread(std::vector<double> c) {
  std::sort(c.begin(), c.end());
  const std::size_t m = c.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += c[c.size() - 1 - i] - c[i];
  return acc;
}

}  // namespace

std::vector<double> stationary_distribution(const Matrix& P) {
  check_stochastic(P, "stationary_distribution");
  const auto n = static_cast<Eigen::Index>(P.size());
  const Eigen::MatrixXd M = to_eigen(P);
  // pi^T (I - P) = 0 transposed: (I - P^T) pi = 0; replace the last equation
  // with the normalization sum(pi) = 1.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - M.transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  // A reducible chain leaves the system singular beyond the replaced
  // normalization row; the residual alone cannot flag that, because any
  // stationary mix of the closed classes solves the fixed-point equation.
  // An exactly singular factorization yields rcond = NaN, so the comparison
  // is written to fail on NaN as well.
  if (!(lu.rcond() >= 1e-13)) {
    throw StructureError(
        "stationary_distribution: the chain appears reducible (singular fixed-point system, "
        "rcond " +
        std::to_string(lu.rcond()) + ")");
  }
  Eigen::VectorXd pi = lu.solve(b);

  double min_entry = pi.minCoeff();
  const double residual = (pi.transpose() * M - pi.transpose()).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || residual > kResidualTol || min_entry < -1e-12) {
    throw StructureError(
        "stationary_distribution: the chain appears reducible (fixed-point residual " +
        std::to_string(residual) + ")");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::max(pi(i), 0.0);
    sum += out[static_cast<std::size_t>(i)];
  }
  for (double& v : out) v /= sum;
  return out;
}

FundamentalMatrix fundamental_matrix(const Matrix& P, std::span<const double> pi, ZSign sign) {
  check_stochastic(P, "fundamental_matrix");
  const auto n = static_cast<Eigen::Index>(P.size());
  if (pi.size() != P.size()) {
    throw ValidationError("fundamental_matrix: pi length does not match the matrix");
  }
  Eigen::VectorXd piv(n);
  for (Eigen::Index i = 0; i < n; ++i) piv(i) = pi[static_cast<std::size_t>(i)];
  const double outer_sign = sign == ZSign::kPaper ? -1.0 : 1.0;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - to_eigen(P) +
                            outer_sign * Eigen::VectorXd::Ones(n) * piv.transpose();
  const Eigen::MatrixXd Z = A.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  FundamentalMatrix fm;
  fm.norm1 = norm1(Z);
  fm.condition = norm1(A) * fm.norm1;
  if (!Z.allFinite() || fm.condition > kConditionLimit) {
    throw NumericError("fundamental_matrix: system is ill-conditioned (1-norm condition " +
                       std::to_string(fm.condition) + " exceeds 1e12)");
  }
  fm.Z.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      fm.Z[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Z(i, j);
    }
  }
  return fm;
}

double tau_inf(const Matrix& P) {
  check_stochastic(P, "tau_inf");
  const std::size_t n = P.size();
  double best = 0.0;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = P[i][j];
    best = std::max(best, column_spread(col));
  }
  return best;
}

double tau_inf_bruteforce(const Matrix& P) {
  check_stochastic(P, "tau_inf_bruteforce");
  const std::size_t n = P.size();
  if (n > 10) {
    throw ValidationError("tau_inf_bruteforce: supports n <= 10, got " + std::to_string(n));
  }
  std::vector<double> z(n);
  double best = 0.0;
  for (std::size_t balancer = 0; balancer < n; ++balancer) {
    const std::size_t patterns = std::size_t{1} << (n - 1);
    for (std::size_t bits = 0; bits < patterns; ++bits) {
      double sum = 0.0;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == balancer) continue;
        z[i] = (bits >> bit) & 1 ? 1.0 : -1.0;
        sum += z[i];
        ++bit;
      }
      if (std::abs(sum) > 1.0 + 1e-12) continue;
      z[balancer] = -sum;
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += P[i][j] * z[i];
        best = std::max(best, std::abs(dot));
      }
    }
  }
  return best;
}

TransitionModel build_transition_model(const Matrix& P, std::vector<std::string> state_labels,
                                       ZSign sign) {
  check_stochastic(P, "build_transition_model");
  const std::size_t n = P.size();
  if (state_labels.empty()) {
    state_labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) state_labels.push_back("s" + std::to_string(i));
  }
  if (state_labels.size() != n) {
    throw ValidationError("build_transition_model: label count does not match the matrix");
  }
  TransitionModel m;
  m.P = P;
  m.state_labels = std::move(state_labels);
  m.diagnostics.strictly_positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(P[i][j] > 0.0)) m.diagnostics.strictly_positive = false;
    }
  }
  m.pi = stationary_distribution(P);
  m.diagnostics.irreducible = true;  // the solve above rejects reducible chains
  m.tau_inf = tau_inf(P);
  const FundamentalMatrix fm = fundamental_matrix(P, m.pi, sign);
  m.z_norm1 = fm.norm1;
  m.z_condition = fm.condition;
  m.z_sign = sign;
  return m;
}

PerturbationBounds perturbation_bounds(const Matrix& P, std::span<const double> pi,
                                       std::span<const std::int64_t> Ns,
                                       std::span<const double> ks, ZSign sign) {
  check_stochastic(P, "perturbation_bounds");
  PerturbationBounds b;
  b.L = markov_kl_bound(Ns, static_cast<int>(P.size()), ks, pi);
  const double root = expected_l1_bound(b.L);  // sqrt(2L)
  const FundamentalMatrix fm = fundamental_matrix(P, pi, sign);
  b.tv_bound = 0.5 * fm.norm1 * root;
  b.tau_bound = root;
  return b;
}

}  // namespace simplexdp
