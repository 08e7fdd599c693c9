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

#include "jbal/rng.h"

#include <cmath>
#include <numbers>

#include "jbal/errors.h"

namespace jbal {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t Mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Rng::Rng(std::uint64_t seed) : key_(Mix64(seed + kGamma)) {}

Rng Rng::Split(std::uint64_t stream) const {
  return Rng(Mix64(key_ ^ Mix64(stream * kGamma + 0x632be59bd9b4e019ULL)), 0, 0);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return Rng(seed).Split(stream).key();
}

std::uint64_t Rng::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGamma);
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double Rng::UniformOpen() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Normal() {
  // Box-Muller; one draw per pair of uniforms keeps the stream stateless.
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::UniformInt(std::uint64_t n) {
  if (n == 0) throw ArgumentError("UniformInt: empty range");
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

std::size_t Rng::Categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ArgumentError("Categorical: weights have no mass");
  const double target = Uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

std::size_t Rng::FromCumulative(std::span<const double> cumulative) {
  if (cumulative.empty() || !(cumulative.back() > 0.0)) {
    throw ArgumentError("FromCumulative: table has no mass");
  }
  const double target = Uniform() * cumulative.back();
  std::size_t lo = 0;
  std::size_t hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (target < cumulative[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace jbal
