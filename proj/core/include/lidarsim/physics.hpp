// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/rng.hpp"
#include "lidarsim/sampler.hpp"
#include "lidarsim/spectral.hpp"

#include <cstdint>
#include <string_view>
#include <variant>

namespace lidarsim {

/// Final point in the sensor frame of the tick it was captured in.
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double range = 0.0;      // with noise
  double intensity = 0.0;  // Lambertian reflectance R(theta), fraction
  double theta = 0.0;      // azimuth
  double phi = 0.0;        // elevation
  double incidence = 0.0;  // as read from the buffers
  int ring = 0;
  int column = 0;
  std::uint32_t instance_id = 0;
  std::uint8_t material_index = 0;
  double timestamp = 0.0;
};

enum class DropReason { beyond_max_range, below_capability };

std::string_view to_string(DropReason reason);

struct DroppedReturn {
  DropReason reason;
  double range = 0.0;
  double intensity = 0.0;
};

using FinalizedReturn = std::variant<LidarPoint, DroppedReturn>;

/// r0 * cos(incidence), clamped to [0, 1].
double lambertian_intensity(double r0, double incidence);

/// Reflectance needed to detect a target at range d: r_l_max / d_max * d.
/// Returns +infinity beyond d_max so that every comparison drops the point.
double capability_threshold(double d, double d_max, double r_l_max);

/// range + N(0, sigma0 + k * range), clamped at zero.
double apply_noise(double range, const SensorProfile& profile, const NoiseKey& key);

NoiseKey noise_key(const SensorProfile& profile, const BeamSample& beam);

/// Turns a hit into a point or a drop decision. Kept iff the noisy range is
/// within d_max and capability_threshold(noisy range) <= intensity.
/// Throws std::invalid_argument for a miss.
FinalizedReturn finalize(const RawReturn& raw, const SpectralLibrary& library, const SensorProfile& profile);

}  // namespace lidarsim
