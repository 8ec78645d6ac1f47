// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lidarsim {

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::beyond_max_range:
      return "beyond-max-range";
    case DropReason::below_capability:
      return "below-capability";
  }
  return "unknown";
}

double lambertian_intensity(double r0, double incidence) {
  return std::clamp(r0 * std::cos(incidence), 0.0, 1.0);
}

double capability_threshold(double d, double d_max, double r_l_max) {
  if (d > d_max) {
    return kInfinity;
  }
  // d / d_max first so that the endpoints come out exact.
  return r_l_max * (d / d_max);
}

double apply_noise(double range, const SensorProfile& profile, const NoiseKey& key) {
  const double sigma = profile.noise_sigma + profile.noise_range_coeff * range;
  if (sigma == 0.0) {
    return range;
  }
  return std::max(0.0, range + sigma * key.standard_normal());
}

NoiseKey noise_key(const SensorProfile& profile, const BeamSample& beam) {
  return NoiseKey{profile.seed, beam.revolution, beam.column, beam.channel};
}

FinalizedReturn finalize(const RawReturn& raw, const SpectralLibrary& library, const SensorProfile& profile) {
  if (!raw.hit) {
    throw std::invalid_argument("finalize: beam did not hit anything");
  }
  const double r0 = library.reflectance_at(raw.material_index, profile.wavelength_nm);
  const double intensity = lambertian_intensity(r0, raw.incidence);
  const double range = apply_noise(raw.depth, profile, noise_key(profile, raw.beam));

  if (range > profile.d_max) {
    return DroppedReturn{DropReason::beyond_max_range, range, intensity};
  }
  if (!(capability_threshold(range, profile.d_max, profile.r_l_max) <= intensity)) {
    return DroppedReturn{DropReason::below_capability, range, intensity};
  }

  LidarPoint p;
  const double theta = raw.beam.azimuth;
  const double phi = raw.beam.elevation;
  const double cp = std::cos(phi);
  p.x = range * cp * std::cos(theta);
  p.y = range * cp * std::sin(theta);
  p.z = range * std::sin(phi);
  p.range = range;
  p.intensity = intensity;
  p.theta = theta;
  p.phi = phi;
  p.incidence = raw.incidence;
  p.ring = raw.beam.channel;
  p.column = raw.beam.column;
  p.instance_id = raw.instance_id;
  p.material_index = raw.material_index;
  p.timestamp = raw.beam.timestamp;
  return p;
}

}  // namespace lidarsim
