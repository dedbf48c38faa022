/* Copyright 2026 The Dancekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Counter-based deterministic random numbers (Philox 4x32-10, Salmon et al.
// SC'11). Every draw is a pure function of (seed, stream, index), so results
// are independent of evaluation order, batching, and threading.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace dk::rng {

namespace detail {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 =
      static_cast<std::uint64_t>(kPhiloxM4x32A) * ctr[0];
  const std::uint64_t p1 =
      static_cast<std::uint64_t>(kPhiloxM4x32B) * ctr[2];
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kPhiloxW32A;
  key[1] += kPhiloxW32B;
}

}  // namespace detail

// One 128-bit Philox block for the given key and counter.
inline std::array<std::uint32_t, 4> philox4x32(
    std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
  std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key),
                                    static_cast<std::uint32_t>(key >> 32)};
  for (int round = 0; round < 10; ++round) {
    detail::philox_round(ctr, k);
  }
  return ctr;
}

// Stateless generator: draws are keyed by (seed, stream, index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::array<std::uint32_t, 4> block(std::uint64_t stream,
                                     std::uint64_t index) const {
    return philox4x32(seed_,
                      {static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32)});
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform(std::uint64_t stream, std::uint64_t index) const {
    const auto r = block(stream, index);
    const std::uint64_t mant =
        (static_cast<std::uint64_t>(r[0]) << 21) | (r[1] >> 11);
    return static_cast<double>(mant) * 0x1p-53;
  }

  // Uniform in [lo, hi).
  double uniform(std::uint64_t stream, std::uint64_t index, double lo,
                 double hi) const {
    return lo + (hi - lo) * uniform(stream, index);
  }

  // Standard normal via Box-Muller from one Philox block.
  double normal(std::uint64_t stream, std::uint64_t index) const {
    const auto r = block(stream, index);
    const std::uint64_t m1 =
        (static_cast<std::uint64_t>(r[0]) << 21) | (r[1] >> 11);
    const std::uint64_t m2 =
        (static_cast<std::uint64_t>(r[2]) << 21) | (r[3] >> 11);
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>(m1 + 1) * 0x1p-53;
    const double u2 = static_cast<double>(m2) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace dk::rng
