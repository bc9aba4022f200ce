/*
 * Copyright 2026 The ddiadv Authors.
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

#ifndef DDIADV_RNG_H_
#define DDIADV_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace ddiadv {

// xoshiro256** seeded through splitmix64. The algorithm is fixed so that a
// seed reproduces the same stream on every platform; nothing here touches
// std::random_device or implementation-defined distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0);

  uint64_t seed() const { return seed_; }

  uint64_t NextU64();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();

  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Fisher-Yates, portable (std::shuffle is implementation-defined).
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Derives an independent stream, e.g. one per training phase.
  Rng Fork();

 private:
  uint64_t seed_;
  std::array<uint64_t, 4> state_;
};

// One splitmix64 step; also used to mix seeds.
uint64_t SplitMix64(uint64_t& state);

}  // namespace ddiadv

#endif  // DDIADV_RNG_H_
