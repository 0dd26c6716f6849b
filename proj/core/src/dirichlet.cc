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

#include <cmath>
#include <cstddef>
#include <string>

#include "simplexdp/errors.h"
#include "simplexdp/specfun.h"

namespace simplexdp {

namespace {
constexpr double kShapeFloor = 1e-12;
constexpr double kBoundaryNudge = 1e-300;
}  // namespace

DirichletParams DirichletParams::create(CountVector p, double k) {
  if (!std::isfinite(k) || k <= 0.0) {
    throw ValidationError("DirichletParams: concentration k must be positive and finite");
  }
  if (p.probs.size() < 2) {
    throw ValidationError("DirichletParams: need at least 2 coordinates");
  }
  double sum = 0.0;
  for (double pi : p.probs) {
    if (!(pi > 0.0)) {
      throw ValidationError("DirichletParams: center must be strictly interior to the simplex");
    }
    sum += pi;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("DirichletParams: center entries sum to " + std::to_string(sum) +
                          ", expected 1");
  }
  return DirichletParams{std::move(p), k};
}

std::vector<double> sample(const DirichletParams& params, RngStream& rng,
                           DrawDiagnostics* diagnostics) {
  const std::size_t n = params.p.probs.size();
  std::vector<double> draw(n);
  double sum = 0.0;
  bool nudged = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double shape = params.k * params.p.probs[i];
    if (shape < kShapeFloor) {
      throw NumericError("sample: shape " + std::to_string(shape) + " for coordinate " +
                         std::to_string(i) +
                         " underflows; increase k or merge sparse categories");
    }
    double g = rng.gamma(shape);
    if (g <= 0.0) {
      g = kBoundaryNudge;
      nudged = true;
    }
    draw[i] = g;
    sum += g;
  }
  for (std::size_t i = 0; i < n; ++i) draw[i] /= sum;
  if (nudged && diagnostics != nullptr) ++diagnostics->boundary_nudges;
  return draw;
}

double log_density(const DirichletParams& params, std::span<const double> x) {
  const std::size_t n = params.p.probs.size();
  if (x.size() != n) {
    throw ValidationError("log_density: point has " + std::to_string(x.size()) +
                          " coordinates, expected " + std::to_string(n));
  }
  double sum = 0.0;
  for (double xi : x) {
    if (!(xi > 0.0)) {
      throw ValidationError("log_density: point must be strictly interior to the simplex");
    }
    sum += xi;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("log_density: point entries sum to " + std::to_string(sum) +
                          ", expected 1");
  }
  std::vector<double> shapes(n);
  for (std::size_t i = 0; i < n; ++i) shapes[i] = params.k * params.p.probs[i];
  double acc = -specfun::log_multivariate_beta(shapes);
  for (std::size_t i = 0; i < n; ++i) acc += (shapes[i] - 1.0) * std::log(x[i]);
  return acc;
}

}  // namespace simplexdp
