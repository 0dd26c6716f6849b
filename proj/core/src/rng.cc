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

#include "simplexdp/rng.h"

#include <cmath>
#include <string>

#include "simplexdp/errors.h"

namespace simplexdp {
namespace {

// splitmix64 finalizer; mixes substream addresses into fresh stream ids.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t child, std::uint64_t tag) {
  return splitmix64(parent ^ splitmix64((tag << 56) ^ child));
}

std::mt19937_64 make_engine(RngSeed s) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
      static_cast<std::uint32_t>(s.stream_id), static_cast<std::uint32_t>(s.stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(RngSeed s) : seed_(s), engine_(make_engine(s)) {}

double RngStream::uniform() {
  // 53 significant bits, shifted to the open interval: the result is
  // (m + 0.5) * 2^-53 for m in [0, 2^53), never exactly 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

double RngStream::gamma(double shape) {
  if (!std::isfinite(shape) || shape <= 0.0) {
    throw ValidationError("gamma: shape must be positive and finite, got " +
                          std::to_string(shape));
  }
  if (shape < 1.0) {
    // Boost a shape-(a+1) draw down: X = Y * U^(1/a).
    const double y = gamma(shape + 1.0);
    const double u = uniform();
    return y * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

RngStream RngStream::substream(std::uint64_t child_id) const {
  return RngStream(RngSeed{seed_.seed, derive_stream(seed_.stream_id, child_id, 0)});
}

RngStream RngStream::fork() {
  return RngStream(RngSeed{seed_.seed, derive_stream(seed_.stream_id, fork_count_++, 1)});
}

}  // namespace simplexdp
