//
// Copyright 2026 The R2DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef R2DP_RANDOM_H_
#define R2DP_RANDOM_H_

#include <cstdint>
#include <random>

namespace r2dp {

// Caller-owned random source. Nothing in the library keeps global RNG state.
using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of substream `stream` under `master`. Distinct streams give
// statistically independent generators.
constexpr uint64_t DeriveSeed(uint64_t master, uint64_t stream) {
  return MixSeed(MixSeed(master) ^ MixSeed(stream + 0x632be59bd9b4e019ULL));
}

inline Rng DeriveStream(uint64_t master, uint64_t stream) {
  return Rng(DeriveSeed(master, stream));
}

// Uniform draw on the open interval (0, 1).
inline double OpenUniform(Rng& rng) {
  for (;;) {
    const double u = std::generate_canonical<double, 53>(rng);
    if (u > 0.0) return u;
  }
}

}  // namespace r2dp

#endif  // R2DP_RANDOM_H_
