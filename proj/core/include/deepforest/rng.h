/*
 * Copyright 2026 The deepforest Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPFOREST_RNG_H_
#define DEEPFOREST_RNG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace deepforest {

// SplitMix64 finalizer. Used both to expand seeds and to derive child seeds.
uint64_t Mix64(uint64_t x);

// Derives the seed of sub-stream `stream` from `seed`:
//   Mix64(seed ^ Mix64(stream + 0x9E3779B97F4A7C15))
// The function is part of the model contract (per-tree seeds are derived
// with it), so it must never change.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// xoshiro256** generator with platform-independent helpers. The standard
// <random> distributions are implementation defined, so every draw used by
// training goes through this class.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t Next();

  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t UniformInt(uint64_t bound);

  // Uniform double in the open interval (0, 1).
  double UniformOpen();

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  uint64_t state_[4];
};

}  // namespace deepforest

#endif  // DEEPFOREST_RNG_H_
