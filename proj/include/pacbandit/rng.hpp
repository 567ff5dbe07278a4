// Copyright 2026 The pacbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACBANDIT_RNG_HPP_
#define PACBANDIT_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace pacbandit {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master_seed`.
///
/// Streams are derived as splitmix64(splitmix64(master_seed) ^ splitmix64(
/// index + 1)), so trajectory i always sees the same sequence regardless of
/// which worker runs it or in which order.
inline std::uint64_t stream_seed(std::uint64_t master_seed,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1));
}

inline Engine make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Engine(stream_seed(master_seed, index));
}

// Uniform on [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Engine& rng, double p) { return uniform01(rng) < p; }

// Inverse-CDF draw from a probability vector. Falls back to the last index
// with positive mass when rounding leaves the cumulative sum short of u.
inline std::size_t sample_index(Engine& rng, std::span<const double> probs) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace pacbandit

#endif  // PACBANDIT_RNG_HPP_
