/*
 * Copyright 2026 The jbal Authors.
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

#ifndef JBAL_RNG_H_
#define JBAL_RNG_H_

#include <cstdint>
#include <span>
#include <vector>

namespace jbal {

// Counter-based pseudo random stream. The n-th output is a pure function of
// (key, n), so streams can be split into independent children without
// consuming state, and every result is reproducible from the seed alone.
//
// The mixing function is the SplitMix64 finalizer; keys are derived from the
// seed and a path of stream identifiers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child stream. Does not advance this stream.
  Rng Split(std::uint64_t stream) const;

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform integer on [0, n). Unbiased (rejection sampling).
  std::uint64_t UniformInt(std::uint64_t n);
  // Index drawn with probability proportional to `weights`.
  std::size_t Categorical(std::span<const double> weights);
  // Index drawn from a non-decreasing cumulative table whose last entry is
  // the total mass.
  std::size_t FromCumulative(std::span<const double> cumulative);

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  Rng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer; exposed for hashing (e.g. config digests).
std::uint64_t Mix64(std::uint64_t x);

// Seed of child stream `stream` of `seed`; equal to Rng(seed).Split(stream).key().
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace jbal

#endif  // JBAL_RNG_H_
