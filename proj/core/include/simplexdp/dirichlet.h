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
// The Dirichlet mechanism: sampling from and evaluating the density of
// Dir(k*p) for a simplex-valued center p. Releasing such a draw instead of p
// is unbiased and simplex-preserving; larger k concentrates the draw near p.

#ifndef SIMPLEXDP_DIRICHLET_H_
#define SIMPLEXDP_DIRICHLET_H_

#include <span>
#include <vector>

#include "simplexdp/data.h"
#include "simplexdp/rng.h"

namespace simplexdp {

struct DirichletParams {
  CountVector p;  // interior of the simplex: all entries > 0
  double k = 0.0;

  static DirichletParams create(CountVector p, double k);
};

struct DrawDiagnostics {
  // Draws where a coordinate underflowed to zero and was nudged to 1e-300.
  // Such draws land in the bad set for any practical gamma.
  std::int64_t boundary_nudges = 0;
};

// One draw from Dir(k*p): n independent standard-gamma variates with shapes
// k*p_i, normalized by their sum. Output entries >= 0, summing to 1 within
// 1e-12. Throws NumericError when any shape k*p_i < 1e-12.
std::vector<double> sample(const DirichletParams& params, RngStream& rng,
                           DrawDiagnostics* diagnostics = nullptr);

// Log-density of Dir(k*p) at a strictly interior point x on the simplex.
double log_density(const DirichletParams& params, std::span<const double> x);

}  // namespace simplexdp

#endif  // SIMPLEXDP_DIRICHLET_H_
