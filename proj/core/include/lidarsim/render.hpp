// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/encoding.hpp"
#include "lidarsim/geometry.hpp"
#include "lidarsim/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lidarsim {

/// Ideal square pinhole camera: f_x = f_y = W / (2 tan(FOV_c / 2)), c_u = c_v = W / 2.
///
/// Image coordinates: column u grows with azimuth (towards +y of the capture
/// frame), row v grows downwards (towards -z). Pixel k is centred on
/// coordinate k, so the principal point lands on the centre of pixel W/2.
struct CameraIntrinsics {
  int width = 0;
  double fov = 0.0;  // radians, horizontal == vertical
  double fx = 0.0;
  double fy = 0.0;
  double cu = 0.0;
  double cv = 0.0;
};

/// Throws RangeError unless `width` is even and >= 64 and 0 < fov < pi.
CameraIntrinsics make_intrinsics(int width, double fov);

/// Unit direction, in the capture frame (x = optical axis, z up), of the ray
/// through image coordinate (u, v).
Vec3 pixel_direction(const CameraIntrinsics& intr, double u, double v);

/// Rotation taking capture-frame vectors to the sensor frame.
Mat3 capture_rotation(double yaw);

struct Capture {
  double yaw = 0.0;            // optical axis azimuth, sensor frame
  double azimuth_begin = 0.0;  // sensor-frame azimuth covered by this capture
  double azimuth_span = 0.0;
  CameraIntrinsics intrinsics;
};

struct CaptureOptions {
  int width = 1024;
  double max_capture_fov = deg2rad(100.0);
  double margin = deg2rad(2.0);
};

/// The virtual camera captures for one simulation tick. Captures are
/// contiguous and together span [sweep_start, sweep_start + covered_azimuth).
struct CapturePlan {
  std::vector<Capture> captures;
  double sweep_start = 0.0;
  double covered_azimuth = 0.0;

  /// Capture owning a sweep offset (azimuth - sweep_start) in [0, covered_azimuth).
  std::size_t capture_for_offset(double offset) const;
};

/// Smallest camera FOV whose square frustum contains every beam with
/// |azimuth offset| <= share / 2 and |elevation| <= fov_v / 2.
double required_capture_fov(double share, double sensor_fov_v);

/// Splits the azimuth swept in `dt` at `spin_rate` (capped at one revolution)
/// into the fewest equal captures whose FOV, including `margin`, stays within
/// `max_capture_fov`.
CapturePlan plan_captures(double spin_rate, double dt, double sensor_fov_v,
                          const CaptureOptions& options = {}, double sweep_start = 0.0);

/// Per-pixel render targets of one capture.
///
/// Misses carry instance 0 and depth +infinity. `depth24` holds the three-byte
/// code for hits within `depth_range`; beyond that range there is no code and
/// the full-precision value is authoritative. `incidence_rgba` packs the
/// incidence angle with the material index in alpha.
struct FrameBuffers {
  CameraIntrinsics intrinsics;
  double yaw = 0.0;
  Pose sensor_pose = Pose::Identity();
  double depth_range = 0.0;

  std::vector<double> depth;
  std::vector<Rgb8> depth24;
  std::vector<double> incidence;
  std::vector<Rgba8> incidence_rgba;
  std::vector<std::uint8_t> material;
  std::vector<std::uint32_t> instance;
  std::vector<std::uint32_t> triangle;

  int width() const { return intrinsics.width; }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * intrinsics.width + x; }
  bool is_hit(std::size_t idx) const { return instance[idx] != kNoInstance; }

  /// Depth as read back from the buffer: decoded three-byte value when
  /// `use_24bit` and the hit lies within `depth_range`.
  double read_depth(std::size_t idx, bool use_24bit) const;
  double read_incidence(std::size_t idx, bool use_24bit) const;
  std::uint8_t read_material(std::size_t idx, bool use_24bit) const;
};

/// Casts one ray per pixel centre from the sensor origin against the scene
/// BVH. Depth is the Euclidean sensor-to-hit distance; incidence is
/// acos(|n . b|) with n the unit shading normal and b the unit ray direction.
/// Rows are processed in parallel.
FrameBuffers rasterize(const Scene& scene, const Pose& sensor_pose, double yaw,
                       const CameraIntrinsics& intr, double depth_range);

/// Writes depth and incidence as normalized 8-bit PGM, material as raw 8-bit
/// PGM and instance ids as RGB888 PPM. Files are named `<stem>_<buffer>.p?m`.
void write_debug_images(const FrameBuffers& frames, const std::filesystem::path& directory,
                        const std::string& stem);

}  // namespace lidarsim
