// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/encoding.hpp"

#include "lidarsim/error.hpp"
#include "lidarsim/geometry.hpp"

#include <fmt/format.h>

#include <cmath>

namespace lidarsim {

namespace {

constexpr double kHalfPi = kPi / 2.0;

std::uint32_t quantize(double value, double full_scale) {
  return static_cast<std::uint32_t>(std::llround(value / full_scale * kMax24));
}

}  // namespace

Rgb8 encode_depth_24(double depth, double d_max) {
  if (!(d_max > 0.0)) {
    throw RangeError(fmt::format("depth encode range {} must be positive", d_max));
  }
  if (!(depth >= 0.0 && depth <= d_max)) {
    throw RangeError(fmt::format("depth {} m outside encodable range [0, {}] m", depth, d_max));
  }
  return pack24(quantize(depth, d_max));
}

double decode_depth_24(const Rgb8& bytes, double d_max) {
  return static_cast<double>(unpack24(bytes)) / kMax24 * d_max;
}

Rgba8 encode_incidence_rgba(double angle, std::uint8_t material_index) {
  if (!(angle >= 0.0 && angle <= kHalfPi)) {
    throw RangeError(fmt::format("incidence angle {} rad outside [0, pi/2]", angle));
  }
  const Rgb8 rgb = pack24(quantize(angle, kHalfPi));
  return {rgb[0], rgb[1], rgb[2], material_index};
}

DecodedIncidence decode_incidence_rgba(const Rgba8& bytes) {
  const double angle = static_cast<double>(unpack24({bytes[0], bytes[1], bytes[2]})) / kMax24 * kHalfPi;
  return {angle, bytes[3]};
}

}  // namespace lidarsim
