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
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "simplexdp/errors.h"
#include "simplexdp/specfun.h"

namespace simplexdp {
namespace {

using specfun::log_beta;
using specfun::log_multivariate_beta;

constexpr double kEtaCeiling = 0.25;
constexpr double kCalibrationTol = 1e-9;
constexpr std::int64_t kMinMcSamples = 1000;
constexpr std::int64_t kMcBlock = 65536;
constexpr double kShapeFloor = 1e-12;
constexpr double kBoundaryNudge = 1e-300;

std::vector<double> shapes_of(const CountVector& q, double k) {
  std::vector<double> shapes(q.probs.size());
  for (std::size_t i = 0; i < q.probs.size(); ++i) {
    const double s = k * q.probs[i];
    if (s < kShapeFloor) {
      throw NumericError("privacy: shape " + std::to_string(s) + " for coordinate " +
                         std::to_string(i) +
                         " underflows; increase k or merge sparse categories");
    }
    shapes[i] = s;
  }
  return shapes;
}

// Monte-Carlo Omega_1 mass for fixed Dirichlet shapes. Work is split into
// fixed-size blocks, one addressed substream per block; the hit counts are
// integers, so the reduction is exact and independent of the worker count.
McEstimate omega1_mc_shapes(const std::vector<double>& shapes, double gamma,
                            std::int64_t samples, const RngStream& base) {
  const std::size_t n = shapes.size();
  const std::int64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(blocks), 0);
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto run_blocks = [&]() {
    try {
      std::vector<double> draw(n);
      for (;;) {
        const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= blocks) break;
        RngStream stream = base.substream(static_cast<std::uint64_t>(b));
        const std::int64_t count = std::min(kMcBlock, samples - b * kMcBlock);
        std::int64_t h = 0;
        for (std::int64_t t = 0; t < count; ++t) {
          double sum = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            double g = stream.gamma(shapes[i]);
            if (g <= 0.0) g = kBoundaryNudge;
            draw[i] = g;
            sum += g;
          }
          bool inside = true;
          for (std::size_t i = 0; i < n; ++i) {
            if (draw[i] / sum < gamma) {
              inside = false;
              break;
            }
          }
          if (inside) ++h;
        }
        hits[static_cast<std::size_t>(b)] = h;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  const int workers =
      static_cast<int>(std::min<std::int64_t>(mc_worker_count(), blocks));
  if (workers <= 1) {
    run_blocks();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run_blocks);
    run_blocks();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  McEstimate e;
  e.estimate = static_cast<double>(total) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
  return e;
}

// Adaptive Simpson with Richardson correction.
template <typename F>
double simpson_recurse(const F& f, double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, 30);
}

void check_samples(std::int64_t samples) {
  if (samples < kMinMcSamples) {
    throw ValidationError("privacy: Monte-Carlo sample count must be at least " +
                          std::to_string(kMinMcSamples) + ", got " + std::to_string(samples));
  }
}

void check_dimensions(const CountVector& q, const MechanismConfig& cfg, const char* fn) {
  if (q.n != cfg.n || static_cast<std::size_t>(q.n) != q.probs.size()) {
    throw ValidationError(std::string(fn) + ": count vector has n = " + std::to_string(q.n) +
                          ", config has n = " + std::to_string(cfg.n));
  }
  if (q.N != cfg.N) {
    throw ValidationError(std::string(fn) + ": count vector has N = " + std::to_string(q.N) +
                          ", config has N = " + std::to_string(cfg.N));
  }
}

void check_admission(const CountVector& q, const MechanismConfig& cfg, const std::string& what) {
  const double m = q.min_entry();
  if (m < cfg.eta - 1e-12) {
    throw AdmissionError(what + ": minimum entry " + std::to_string(m) +
                         " is below eta = " + std::to_string(cfg.eta) +
                         "; not admitted to the bordered simplex");
  }
}

}  // namespace

MechanismConfig MechanismConfig::validated(double k, double eta, double gamma, std::int64_t N,
                                           int n) {
  if (n < 3) {
    throw ValidationError("MechanismConfig: n must be at least 3, got " + std::to_string(n));
  }
  if (N < 1) {
    throw ValidationError("MechanismConfig: N must be a positive record count, got " +
                          std::to_string(N));
  }
  if (!std::isfinite(eta) || eta <= 0.0 || eta >= kEtaCeiling) {
    throw ValidationError("MechanismConfig: eta must lie in (0, 1/4), got " +
                          std::to_string(eta));
  }
  const double gamma_cap = 1.0 / (n - 1);
  if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > gamma_cap) {
    throw ValidationError("MechanismConfig: gamma must lie in (0, 1/(n-1)] = (0, " +
                          std::to_string(gamma_cap) + "], got " + std::to_string(gamma));
  }
  const double mk = 3.0 / (2.0 * eta);
  if (!std::isfinite(k) || k < mk * (1.0 - 1e-12)) {
    throw ValidationError("MechanismConfig: k must be at least 3/(2*eta) = " +
                          std::to_string(mk) + ", got " + std::to_string(k));
  }
  return MechanismConfig{k, eta, gamma, N, n};
}

const char* budget_method_name(BudgetMethod method) {
  switch (method) {
    case BudgetMethod::kClosedFormEpsilon:
      return "closed-form epsilon";
    case BudgetMethod::kMonteCarloDelta:
      return "monte-carlo delta";
    case BudgetMethod::kQuadratureDelta:
      return "quadrature delta";
    case BudgetMethod::kComposed:
      return "composed";
  }
  return "unknown";
}

double min_k(double eta) {
  if (!std::isfinite(eta) || eta <= 0.0 || eta >= kEtaCeiling) {
    throw ValidationError("min_k: eta must lie in (0, 1/4), got " + std::to_string(eta));
  }
  return 3.0 / (2.0 * eta);
}

double epsilon_bound(const MechanismConfig& cfg) {
  const MechanismConfig c = MechanismConfig::validated(cfg.k, cfg.eta, cfg.gamma, cfg.N, cfg.n);
  const double inv_n_records = 1.0 / static_cast<double>(c.N);
  if (1.0 - 2.0 * c.eta - inv_n_records <= 0.0) {
    throw ValidationError("epsilon_bound: requires 1 - 2*eta - 1/N > 0; eta = " +
                          std::to_string(c.eta) + ", N = " + std::to_string(c.N));
  }
  const double interior_mass = 1.0 - (c.n - 1) * c.gamma;
  if (interior_mass <= 0.0) {
    throw ValidationError(
        "epsilon_bound: requires gamma strictly below 1/(n-1) for a finite epsilon");
  }
  const double beta_ratio =
      log_beta(c.k * c.eta, c.k * (1.0 - 2.0 * c.eta)) -
      log_beta(c.k * (c.eta + inv_n_records), c.k * (1.0 - 2.0 * c.eta - inv_n_records));
  const double log_ratio = std::log(interior_mass) - std::log(c.gamma);
  return beta_ratio + c.k * inv_n_records * log_ratio;
}

double min_epsilon(double eta, double gamma, std::int64_t N, int n) {
  return epsilon_bound(MechanismConfig::validated(min_k(eta), eta, gamma, N, n));
}

double calibrate_k(double target_epsilon, double eta, double gamma, std::int64_t N, int n) {
  if (!std::isfinite(target_epsilon)) {
    throw ValidationError("calibrate_k: target epsilon must be finite");
  }
  const double lo = min_k(eta);
  auto eps_at = [&](double k) {
    return epsilon_bound(MechanismConfig::validated(k, eta, gamma, N, n));
  };
  const double eps_lo = eps_at(lo);
  if (target_epsilon < eps_lo - kCalibrationTol) {
    throw CalibrationError("calibrate_k: target epsilon " + std::to_string(target_epsilon) +
                           " is below the minimum certifiable epsilon " + std::to_string(eps_lo) +
                           " at k = " + std::to_string(lo));
  }
  if (std::abs(eps_lo - target_epsilon) <= kCalibrationTol) return lo;

  // Doubling bracket; the closed form is strictly increasing in k, and the
  // walk verifies that while it expands.
  double a = lo;
  double fa = eps_lo;
  double b = lo;
  double fb = eps_lo;
  bool monotone = true;
  while (fb < target_epsilon) {
    a = b;
    fa = fb;
    b *= 2.0;
    if (b > 1e300) {
      throw CalibrationError("calibrate_k: target epsilon " + std::to_string(target_epsilon) +
                             " is unreachable; the bound saturates near " + std::to_string(fb));
    }
    fb = eps_at(b);
    if (fb < fa - kCalibrationTol) {
      monotone = false;
      break;
    }
  }

  if (monotone) {
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (a + b);
      const double fm = eps_at(mid);
      if (std::abs(fm - target_epsilon) <= kCalibrationTol) return mid;
      if (fm < target_epsilon) {
        a = mid;
      } else {
        b = mid;
      }
      if (b - a <= 1e-13 * b) break;
    }
  }

  // Fallback: fine scan over the bracket, reporting the nearest achievable
  // epsilon when the target cannot be hit.
  double best_k = a;
  double best_gap = std::abs(eps_at(a) - target_epsilon);
  const int grid = 100000;
  for (int i = 1; i <= grid; ++i) {
    const double k = a + (b - a) * static_cast<double>(i) / grid;
    const double gap = std::abs(eps_at(k) - target_epsilon);
    if (gap < best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  if (best_gap > kCalibrationTol) {
    throw CalibrationError("calibrate_k: could not match target epsilon " +
                           std::to_string(target_epsilon) + "; nearest achievable epsilon is " +
                           std::to_string(eps_at(best_k)) + " at k = " + std::to_string(best_k));
  }
  return best_k;
}

int mc_worker_count() {
  if (const char* env = std::getenv("SIMPLEXDP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

McEstimate omega1_probability_mc(const CountVector& q, const MechanismConfig& cfg,
                                 std::int64_t samples, RngStream& rng) {
  const MechanismConfig c = MechanismConfig::validated(cfg.k, cfg.eta, cfg.gamma, cfg.N, cfg.n);
  check_dimensions(q, c, "omega1_probability_mc");
  check_admission(q, c, "omega1_probability_mc");
  check_samples(samples);
  const RngStream base = rng.fork();
  return omega1_mc_shapes(shapes_of(q, c.k), c.gamma, samples, base);
}

// Validation is deliberately lighter than MechanismConfig::validated: the
// quadrature is an integration oracle and stays meaningful for any positive
// shapes, including concentrations below the admissible floor.
double omega1_probability_quadrature(const CountVector& q, const MechanismConfig& cfg) {
  if (cfg.n != 3 && cfg.n != 4) {
    throw ValidationError("omega1_probability_quadrature: supported for n in {3, 4}, got n = " +
                          std::to_string(cfg.n));
  }
  if (static_cast<int>(q.probs.size()) != cfg.n) {
    throw ValidationError("omega1_probability_quadrature: dimension mismatch");
  }
  if (!std::isfinite(cfg.k) || cfg.k <= 0.0) {
    throw ValidationError("omega1_probability_quadrature: k must be positive");
  }
  const double gamma_cap = 1.0 / (cfg.n - 1);
  if (!std::isfinite(cfg.gamma) || cfg.gamma <= 0.0 || cfg.gamma > gamma_cap) {
    throw ValidationError("omega1_probability_quadrature: gamma must lie in (0, 1/(n-1)]");
  }
  const MechanismConfig& c = cfg;
  const std::vector<double> a = shapes_of(q, c.k);
  const double log_norm = log_multivariate_beta(a);
  const double g = c.gamma;

  if (c.n == 3) {
    auto outer = [&](double x1) {
      const double hi = 1.0 - g - x1;
      auto inner = [&](double x2) {
        const double x3 = 1.0 - x1 - x2;
        return std::exp((a[0] - 1.0) * std::log(x1) + (a[1] - 1.0) * std::log(x2) +
                        (a[2] - 1.0) * std::log(x3) - log_norm);
      };
      return adaptive_simpson(inner, g, hi, 1e-10);
    };
    return adaptive_simpson(outer, g, 1.0 - 2.0 * g, 1e-8);
  }

  auto outer = [&](double x1) {
    auto mid = [&](double x2) {
      const double hi = 1.0 - g - x1 - x2;
      auto inner = [&](double x3) {
        const double x4 = 1.0 - x1 - x2 - x3;
        return std::exp((a[0] - 1.0) * std::log(x1) + (a[1] - 1.0) * std::log(x2) +
                        (a[2] - 1.0) * std::log(x3) + (a[3] - 1.0) * std::log(x4) - log_norm);
      };
      return adaptive_simpson(inner, g, hi, 2e-9);
    };
    return adaptive_simpson(mid, g, 1.0 - 2.0 * g - x1, 2e-8);
  };
  return adaptive_simpson(outer, g, 1.0 - 3.0 * g, 2e-7);
}

std::vector<CountVector> delta_extreme_points(const MechanismConfig& cfg) {
  const MechanismConfig c = MechanismConfig::validated(cfg.k, cfg.eta, cfg.gamma, cfg.N, cfg.n);
  // Border count: the largest multiple of 1/N at or below eta, and at least
  // one record. Rounding the border down instead of up keeps the evaluated
  // set a superset of the admissible count vectors, and delta is a minimum
  // over the set, so enclosure can only raise (never understate) the
  // reported delta.
  const double Nd = static_cast<double>(c.N);
  const auto low = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(c.eta * Nd + 1e-9)));
  const std::int64_t high = c.N - static_cast<std::int64_t>(c.n - 1) * low;
  if (high < low) {
    throw ValidationError(
        "delta_bound: the eta border leaves no room on the 1/N count grid (border count " +
        std::to_string(low) + ", remaining mass " + std::to_string(high) + " of N = " +
        std::to_string(c.N) + ")");
  }
  std::vector<CountVector> points;
  points.reserve(static_cast<std::size_t>(c.n));
  for (int placement = 0; placement < c.n; ++placement) {
    CountVector q;
    q.n = c.n;
    q.N = c.N;
    q.probs.assign(static_cast<std::size_t>(c.n), static_cast<double>(low) / Nd);
    q.probs[static_cast<std::size_t>(placement)] = static_cast<double>(high) / Nd;
    q.eta = static_cast<double>(low) / Nd;
    points.push_back(std::move(q));
  }
  return points;
}

PrivacyBudget delta_bound(const MechanismConfig& cfg, std::int64_t samples, RngStream& rng) {
  const MechanismConfig c = MechanismConfig::validated(cfg.k, cfg.eta, cfg.gamma, cfg.N, cfg.n);
  check_samples(samples);
  const std::vector<CountVector> points = delta_extreme_points(c);

  // gamma is uniform across coordinates, so the Omega_1 mass is identical at
  // every placement; evaluate one representative in full and spot-check a
  // second placement for agreement.
  const RngStream rep_stream = rng.fork();
  const McEstimate rep = omega1_mc_shapes(shapes_of(points.front(), c.k), c.gamma, samples,
                                          rep_stream);
  {
    const std::int64_t spot_samples = std::max<std::int64_t>(kMinMcSamples, samples / 100);
    const RngStream spot_stream = rng.fork();
    const McEstimate spot = omega1_mc_shapes(shapes_of(points.back(), c.k), c.gamma,
                                             spot_samples, spot_stream);
    // Plug-in std errors collapse to zero when an estimate sits exactly on 0
    // or 1; widen the agreement slack with boundary-safe proportions so a
    // fully-inside spot check cannot spuriously fail.
    const auto adjusted_se = [](double estimate, std::int64_t m) {
      const double md = static_cast<double>(m);
      const double p = (estimate * md + 2.0) / (md + 4.0);
      return std::sqrt(p * (1.0 - p) / md);
    };
    const double slack =
        6.0 * (adjusted_se(rep.estimate, samples) + adjusted_se(spot.estimate, spot_samples)) +
        1e-9;
    if (std::abs(rep.estimate - spot.estimate) > slack) {
      throw NumericError("delta_bound: extreme-point symmetry check failed (" +
                         std::to_string(rep.estimate) + " vs " + std::to_string(spot.estimate) +
                         ")");
    }
  }

  PrivacyBudget budget;
  budget.epsilon = epsilon_bound(c);
  budget.delta = 1.0 - rep.estimate;
  budget.method = BudgetMethod::kMonteCarloDelta;
  budget.mc_std_error = rep.std_error;
  if (budget.delta >= 0.5) {
    throw ValidationError("delta_bound: estimated delta " + std::to_string(budget.delta) +
                          " is not in [0, 1/2); increase k or relax gamma");
  }
  return budget;
}

PrivacyBudget compose_parallel(std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    throw ValidationError("compose_parallel: need at least one budget");
  }
  PrivacyBudget out;
  out.method = BudgetMethod::kComposed;
  out.epsilon = budgets.front().epsilon;
  out.delta = budgets.front().delta;
  out.mc_std_error = budgets.front().mc_std_error;
  for (const PrivacyBudget& b : budgets.subspan(1)) {
    out.epsilon = std::max(out.epsilon, b.epsilon);
    if (b.delta > out.delta) {
      out.delta = b.delta;
      out.mc_std_error = b.mc_std_error;
    }
  }
  return out;
}

VectorPrivatization privatize_vector(const CountVector& q, const MechanismConfig& cfg,
                                     std::int64_t samples, RngStream& rng) {
  const MechanismConfig c = MechanismConfig::validated(cfg.k, cfg.eta, cfg.gamma, cfg.N, cfg.n);
  check_dimensions(q, c, "privatize_vector");
  check_admission(q, c, "privatize_vector");
  VectorPrivatization out;
  RngStream draw_stream = rng.fork();
  out.private_vector = sample(DirichletParams::create(q, c.k), draw_stream, &out.diagnostics);
  out.budget = delta_bound(c, samples, rng);
  return out;
}

ChainPrivatization privatize_chain(const TransitionCounts& tc,
                                   std::span<const MechanismConfig> cfgs, std::int64_t samples,
                                   RngStream& rng, ZSign z_sign) {
  const std::size_t n = tc.state_labels.size();
  if (tc.rows.size() != n) {
    throw StructureError("privatize_chain: " + std::to_string(tc.rows.size()) +
                         " row(s) for " + std::to_string(n) + " state(s)");
  }
  if (cfgs.size() != n) {
    throw ValidationError("privatize_chain: need one config per row, got " +
                          std::to_string(cfgs.size()) + " for " + std::to_string(n) + " rows");
  }
  const ChainDiagnostics diag = validate_chain_structure(tc);
  if (!diag.pass()) {
    std::string msg = "privatize_chain: structural validation failed;";
    for (const auto& note : diag.notes) msg += " " + note + ";";
    throw StructureError(msg);
  }

  const RngStream draw_base = rng.fork();
  const RngStream delta_base = rng.fork();
  ChainPrivatization out;
  Matrix ptilde(n);
  out.row_budgets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MechanismConfig c =
        MechanismConfig::validated(cfgs[i].k, cfgs[i].eta, cfgs[i].gamma, cfgs[i].N, cfgs[i].n);
    if (c.n != static_cast<int>(n)) {
      throw ValidationError("privatize_chain: config " + std::to_string(i) + " has n = " +
                            std::to_string(c.n) + " for an n = " + std::to_string(n) + " chain");
    }
    check_dimensions(tc.rows[i], c, "privatize_chain");
    check_admission(tc.rows[i], c,
                    "privatize_chain row '" + tc.state_labels.labels[i] + "'");
    RngStream row_stream = draw_base.substream(i);
    ptilde[i] = sample(DirichletParams::create(tc.rows[i], c.k), row_stream, &out.diagnostics);
    RngStream row_delta_stream = delta_base.substream(i);
    out.row_budgets.push_back(delta_bound(c, samples, row_delta_stream));
  }
  out.budget = compose_parallel(out.row_budgets);
  out.model = build_transition_model(ptilde, tc.state_labels.labels, z_sign);
  return out;
}

}  // namespace simplexdp
