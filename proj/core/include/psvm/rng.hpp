//
// Copyright 2026 The psvm Authors
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

#pragma once

// Counter-based random number generation built on the splitmix64 finalizer.
// Every draw is a pure function of (seed, index): disjoint index ranges can
// be evaluated in any order, on any machine, and still reproduce a
// sequential run bit for bit.  Standard-library distributions are avoided
// on purpose; their output is implementation-defined and would break
// cross-toolchain reproducibility.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace psvm {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: bijective on 64-bit words with strong avalanche.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// The index-th raw word of the stream identified by seed.
[[nodiscard]] constexpr std::uint64_t rng_word(std::uint64_t seed,
                                               std::uint64_t index) noexcept {
  return mix64(seed + kGoldenGamma * (index + 1));
}

// Stable seed for a named sub-stream, so independent consumers of one user
// seed never share draws.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                                  std::uint64_t stream) noexcept {
  return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) +
               kGoldenGamma * (stream + 1));
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                                  std::uint64_t stream,
                                                  std::uint64_t index) noexcept {
  return derive_seed(derive_seed(seed, stream), index);
}

// Registry of sub-stream ids used across the library.
enum StreamId : std::uint64_t {
  kStreamSplit = 1,
  kStreamRffFrequencies = 2,
  kStreamRffPhases = 3,
  kStreamNoise = 4,
  kStreamPrototypes = 5,
  kStreamValidation = 6,
  kStreamDpProbes = 7,
  kStreamMap = 8,
  kStreamSample = 9,
  kStreamShuffle = 10,
};

// Uniform draw on the open interval (0, 1).  Both endpoints are
// unreachable, so log(u) and log(1 - u) stay finite.
[[nodiscard]] inline double uniform01(std::uint64_t seed,
                                      std::uint64_t index) noexcept {
  return (static_cast<double>(rng_word(seed, index) >> 11) + 0.5) *
         0x1.0p-53;
}

// Standard normal via Box-Muller; consumes the uniforms at indices
// 2*index and 2*index + 1 of the same stream.
[[nodiscard]] inline double normal01(std::uint64_t seed,
                                     std::uint64_t index) noexcept {
  const double u1 = uniform01(seed, 2 * index);
  const double u2 = uniform01(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Laplace(0, lambda) quantile at u in (0, 1):
//   -lambda * sign(u - 1/2) * ln(1 - 2|u - 1/2|).
[[nodiscard]] inline double laplace_icdf(double u, double lambda) noexcept {
  const double t = u - 0.5;
  const double s = static_cast<double>((t > 0.0) - (t < 0.0));
  return -lambda * s * std::log1p(-2.0 * std::abs(t));
}

// Integer in [0, n) by 128-bit multiply-shift; bias is below n / 2^64 and
// irrelevant at our scales.
[[nodiscard]] constexpr std::uint64_t bounded(std::uint64_t word,
                                              std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(word) * n) >> 64);
}

}  // namespace psvm
