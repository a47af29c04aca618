// core/rng.h

// Copyright 2026  Front-End Adapter Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FEA_CORE_RNG_H_
#define FEA_CORE_RNG_H_

#include <cmath>
#include <cstdint>

namespace fea {

// SplitMix64. Small, fast and fully portable, so random draws are
// bitwise-reproducible across platforms and across resumed runs. All
// stochastic pieces (init, masking, batching, SpecAug) derive their streams
// from (seed, context...) via hash_seed, which makes resume-at-step
// determinism a non-issue: step k always sees the same stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  // uniform integer in [0, n); n must be > 0
  int64_t next_below(int64_t n) {
    return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n));
  }

  // standard normal via Box-Muller
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  uint64_t state() const { return state_; }
  void set_state(uint64_t s) {
    state_ = s;
    have_spare_ = false;
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Deterministic stream derivation: mixes a base seed with context words.
inline uint64_t hash_seed(uint64_t seed, uint64_t a, uint64_t b = 0,
                          uint64_t c = 0) {
  Rng r(seed ^ (a * 0xd6e8feb86659fd93ull) ^ (b * 0xa0761d6478bd642full) ^
        (c * 0xe7037ed1a0b428dbull));
  return r.next_u64();
}

}  // namespace fea

#endif  // FEA_CORE_RNG_H_
