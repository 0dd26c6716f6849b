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
// Scalar special functions used throughout the library. All Beta-function
// arithmetic elsewhere in the repository must route through the log-space
// functions here; a raw Gamma value is never exponentiated except at final
// output. Everything in this header is pure, stateless and reentrant.

#ifndef SIMPLEXDP_SPECFUN_H_
#define SIMPLEXDP_SPECFUN_H_

#include <span>

namespace simplexdp {
namespace specfun {

// ln Gamma(x) for x > 0. Relative error <= 1e-12 on [1e-6, 1e6].
// Throws ValidationError for x <= 0 or non-finite x.
double log_gamma(double x);

// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0. Relative error <= 1e-12.
double digamma(double x);

// Trigamma psi1(x) = sum_{m>=0} 1/(x+m)^2 for x > 0. Relative error <= 1e-10.
double trigamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b), a > 0, b > 0.
double log_beta(double a, double b);

// ln B(y) = sum_i ln Gamma(y_i) - ln Gamma(sum_i y_i); length >= 2, y_i > 0.
double log_multivariate_beta(std::span<const double> y);

}  // namespace specfun
}  // namespace simplexdp

#endif  // SIMPLEXDP_SPECFUN_H_
