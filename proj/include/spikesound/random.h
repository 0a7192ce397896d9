// Copyright 2026 The Spikesound Authors
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

#ifndef SPIKESOUND_RANDOM_H_
#define SPIKESOUND_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spikesound {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a named sub-seed so that every consumer of randomness (a neuron,
// a clip, a run) owns an independent stream regardless of scheduling.
inline uint64_t SubSeed(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t s = MixBits(seed);
  for (uint64_t p : path) s = MixBits(s ^ MixBits(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng MakeRng(uint64_t seed, std::initializer_list<uint64_t> path = {}) {
  return Rng(SubSeed(seed, path));
}

// Uniform double in [0, 1) built from 53 random bits. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace spikesound

#endif  // SPIKESOUND_RANDOM_H_
