// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace lidarsim {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based stream position: the same key always yields the same draws,
/// whatever order beams are processed in.
struct NoiseKey {
  std::uint64_t seed = 0;
  std::int64_t revolution = 0;
  std::int32_t column = 0;
  std::int32_t channel = 0;

  constexpr std::uint64_t hash(std::uint64_t draw) const {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(revolution));
    h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(column)) << 32 |
                   static_cast<std::uint32_t>(channel)));
    return mix64(h ^ draw);
  }

  /// Uniform in (0, 1), 53-bit resolution.
  double uniform(std::uint64_t draw) const {
    return (static_cast<double>(hash(draw) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on draws 0 and 1.
  double standard_normal() const {
    const double u1 = uniform(0);
    const double u2 = uniform(1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
};

}  // namespace lidarsim
