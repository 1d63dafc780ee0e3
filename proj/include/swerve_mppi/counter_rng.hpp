// Copyright 2026 The swerve_mppi Authors
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

#pragma once

/// @file
/// Stateless Gaussian draws addressed by a counter tuple, so every sample is
/// reproducible regardless of which thread computes it or in what order.

#include <cmath>
#include <cstdint>
#include <utility>

namespace swerve {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct NoiseCounter {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  std::uint64_t sample = 0;
  std::uint64_t step = 0;
  std::uint64_t lane = 0;  ///< pair index within the control vector

  constexpr std::uint64_t hash() const {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ iteration);
    h = mix64(h ^ sample);
    h = mix64(h ^ step);
    return mix64(h ^ lane);
  }
};

/// Two independent standard normals for one counter (Marsaglia polar
/// method; each attempt draws a fresh 64-bit word from the counter hash).
inline std::pair<double, double> gaussian_pair(const NoiseCounter& c) {
  const std::uint64_t base = c.hash();
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t h = attempt == 0 ? base : mix64(base ^ (attempt * 0xD1B54A32D192ED03ULL));
    const double u = static_cast<double>(h >> 32) * 0x1.0p-31 - 1.0;
    const double v = static_cast<double>(h & 0xFFFFFFFFULL) * 0x1.0p-31 - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    return {u * f, v * f};
  }
}

}  // namespace swerve
