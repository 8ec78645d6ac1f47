// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace lidarsim {

/// Largest value representable in three bytes.
inline constexpr std::uint32_t kMax24 = (1U << 24) - 1;

using Rgb8 = std::array<std::uint8_t, 3>;
using Rgba8 = std::array<std::uint8_t, 4>;

/// Packs a 24-bit integer big-endian into R, G, B.
constexpr Rgb8 pack24(std::uint32_t value) {
  return {static_cast<std::uint8_t>(value >> 16), static_cast<std::uint8_t>(value >> 8),
          static_cast<std::uint8_t>(value)};
}
constexpr std::uint32_t unpack24(const Rgb8& rgb) {
  return (std::uint32_t{rgb[0]} << 16) | (std::uint32_t{rgb[1]} << 8) | std::uint32_t{rgb[2]};
}

/// Linear quantization of [0, d_max] onto [0, 2^24 - 1], round to nearest.
/// Throws RangeError for depth outside [0, d_max].
Rgb8 encode_depth_24(double depth, double d_max);
double decode_depth_24(const Rgb8& bytes, double d_max);

/// Incidence angle in [0, pi/2] quantized over RGB, material index in alpha.
Rgba8 encode_incidence_rgba(double angle, std::uint8_t material_index);

struct DecodedIncidence {
  double angle;
  std::uint8_t material_index;
};
DecodedIncidence decode_incidence_rgba(const Rgba8& bytes);

}  // namespace lidarsim
