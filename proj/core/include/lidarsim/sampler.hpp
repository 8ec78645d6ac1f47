// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/geometry.hpp"
#include "lidarsim/render.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lidarsim {

/// Full parameterization of a spinning multi-beam LiDAR.
struct SensorProfile {
  int channels = 128;
  int samples_per_rev = 1024;
  double fov_h = 2.0 * kPi;
  double fov_v = deg2rad(90.0);
  /// Explicit per-channel elevations (radians, channel 0 first). Uniform
  /// from +fov_v/2 down to -fov_v/2 when absent.
  std::optional<std::vector<double>> elevation_table;
  double spin_rate = 10.0;       // Hz
  double wavelength_nm = 850.0;
  int width = 1024;              // virtual camera resolution W
  double max_capture_fov = deg2rad(100.0);
  double capture_margin = deg2rad(2.0);
  double d_max = 50.0;           // meters
  double r_l_max = 0.8;          // reflectance needed at d_max
  double noise_sigma = 0.0;      // meters
  double noise_range_coeff = 0.0;
  std::uint64_t seed = 0;

  /// Ouster OS0-128: 128 channels over 90 deg, 1024 columns, 850 nm,
  /// 50 m at 80 % reflectance. Capture cap 115 deg gives a four-capture
  /// revolution.
  static SensorProfile os0_128();

  /// Throws ValidationError on inconsistent fields.
  void validate() const;
  double elevation(int channel) const;
  double column_spacing() const { return fov_h / samples_per_rev; }
  CaptureOptions capture_options() const { return {width, max_capture_fov, capture_margin}; }
};

/// One beam firing. `azimuth` is the sensor-frame azimuth in [0, 2 pi).
struct BeamSample {
  int column = 0;   // i
  int channel = 0;  // j
  std::int64_t revolution = 0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double timestamp = 0.0;
  /// Azimuth travelled since the start of the tick's sweep.
  double sweep_offset = 0.0;
};

/// Beams whose rotor angle (2 pi * revolution + column azimuth) lies in
/// [sweep_start, sweep_end), ordered column-major (all channels of a column
/// together). Angles are absolute rotor angles and may exceed 2 pi.
/// Timestamps run linearly from t0 at sweep_start to t0 + dt at sweep_end.
std::vector<BeamSample> beam_table(const SensorProfile& profile, double sweep_start, double sweep_end, double t0,
                                   double dt);

struct PixelCoord {
  double x;
  double y;
};

/// n_x = f_x tan(theta) + c_u, n_y = -f_y tan(phi) / cos(theta) + c_v, with
/// theta the azimuth relative to the capture's optical axis. Throws
/// OutOfFrustumError when the nearest pixel falls outside the image.
PixelCoord beam_to_pixel(double theta, double phi, const CameraIntrinsics& intr);

/// Buffer contents read at one beam's nearest pixel.
struct RawReturn {
  BeamSample beam;
  bool hit = false;
  double depth = kInfinity;
  double incidence = 0.0;
  std::uint8_t material_index = 0;
  std::uint32_t instance_id = kNoInstance;
  std::uint32_t capture = 0;
  int pixel_x = 0;
  int pixel_y = 0;
};

/// Samples each beam from the capture owning its sweep offset. `frames` is
/// parallel to `plan.captures`. Output order matches `beams`.
std::vector<RawReturn> sample_buffers(const std::vector<BeamSample>& beams, const CapturePlan& plan,
                                      const std::vector<FrameBuffers>& frames, bool use_24bit);

}  // namespace lidarsim
