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

#ifndef SIMPLEXDP_ERRORS_H_
#define SIMPLEXDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace simplexdp {

// Base class for every error the library raises. Each concrete subclass maps
// to a distinct CLI exit code, so failure categories are machine-readable.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parameter or assumption violation (out-of-range eta, gamma, k, domain
// errors in special functions, invalid category sets).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A count vector failed admission to the requested bordered simplex.
class AdmissionError : public Error {
 public:
  using Error::Error;
};

// Markov-chain structural failure: non-square counts, missing states,
// reducible chain where irreducibility is required.
class StructureError : public Error {
 public:
  using Error::Error;
};

// Calibration target unreachable (epsilon below the minimum certifiable
// value, or bracketing failed).
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (bad CSV header, wrong field count, empty field).
class DataFormatError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: ill-conditioned linear system, sampler shape underflow,
// result outside its provable range.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace simplexdp

#endif  // SIMPLEXDP_ERRORS_H_
