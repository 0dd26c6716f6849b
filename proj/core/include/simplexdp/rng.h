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
// Deterministic random-number streams. Reproducibility is an interface
// contract: a fixed (seed, stream_id) pair reproduces an identical draw
// sequence on every platform, so the variate transforms are implemented here
// rather than delegated to the implementation-defined std:: distributions.

#ifndef SIMPLEXDP_RNG_H_
#define SIMPLEXDP_RNG_H_

#include <cstdint>
#include <random>

namespace simplexdp {

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// A named substream of the global seed. Substreams are addressed, not
// sequenced: substream(i) depends only on (seed, stream_id, i), never on how
// much of the parent stream has been consumed. Monte-Carlo work split into
// fixed-size blocks, one substream per block, therefore yields results that
// do not depend on the worker count.
class RngStream {
 public:
  explicit RngStream(RngSeed s);
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : RngStream(RngSeed{seed, stream_id}) {}

  // Uniform draw on the open interval (0, 1).
  double uniform();

  // Standard normal draw (Marsaglia polar method).
  double normal();

  // Standard gamma draw, shape > 0, scale 1 (Marsaglia-Tsang squeeze for
  // shape >= 1, power-boost transform below 1).
  double gamma(double shape);

  // Independent stream addressed by child id; does not consume parent state.
  RngStream substream(std::uint64_t child_id) const;

  // Independent stream addressed by an internal call counter; successive
  // forks of the same parent are distinct and deterministic.
  RngStream fork();

  RngSeed seed() const { return seed_; }

 private:
  RngSeed seed_;
  std::mt19937_64 engine_;
  std::uint64_t fork_count_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace simplexdp

#endif  // SIMPLEXDP_RNG_H_
