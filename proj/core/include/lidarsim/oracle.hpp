// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/physics.hpp"
#include "lidarsim/sampler.hpp"
#include "lidarsim/scene.hpp"
#include "lidarsim/spectral.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lidarsim {

/// Exact nearest intersection for one ray, no raster or quantization stage.
struct OracleHit {
  double depth = 0.0;
  double incidence = 0.0;       // acos(|n . b|), shading normal
  double face_incidence = 0.0;  // same with the geometric face normal
  std::uint8_t material_index = 0;
  std::uint32_t instance_id = kNoInstance;
  std::uint32_t triangle = 0;
};

std::optional<OracleHit> cast_ray(const Scene& scene, const Ray& ray);

/// Casts the beam with sensor-frame azimuth `theta` and elevation `phi`.
std::optional<OracleHit> cast_beam(const Scene& scene, const Pose& sensor_pose, double theta, double phi);

struct ParityOptions {
  bool use_24bit = false;
  double distance_bin_width = 5.0;  // meters
};

/// Raster-path versus oracle comparison for one beam.
struct BeamParity {
  int column = 0;
  int channel = 0;
  bool raster_hit = false;
  bool oracle_hit = false;
  double raster_depth = kInfinity;
  double oracle_depth = kInfinity;
  double delta_depth = 0.0;      // |raster - oracle|
  double delta_incidence = 0.0;  // |raster - oracle|, radians
  double delta_intensity = 0.0;  // |raster - oracle|, fraction
  double pixel_offset = 0.0;     // angle between beam and sampled pixel-centre ray
  double footprint_bound = 0.0;  // analytic |delta depth| bound, meters
  std::uint32_t raster_instance = kNoInstance;
  std::uint32_t oracle_instance = kNoInstance;
  std::uint8_t raster_material = 0;
  std::uint8_t oracle_material = 0;
  bool silhouette = false;

  bool label_mismatch() const {
    return raster_hit != oracle_hit || raster_instance != oracle_instance || raster_material != oracle_material;
  }
  bool within_bound() const { return delta_depth <= footprint_bound; }
};

/// One row of an error table: mean and standard deviation of |delta depth|
/// (meters) and |delta intensity| (fraction) over non-silhouette hits.
struct ParityGroup {
  std::string label;
  std::size_t count = 0;
  double depth_mean = 0.0;
  double depth_std = 0.0;
  double intensity_mean = 0.0;
  double intensity_std = 0.0;
};

struct ParityReport {
  std::vector<BeamParity> beams;
  std::vector<ParityGroup> by_distance;
  std::vector<ParityGroup> by_material;
  std::size_t total_beams = 0;
  std::size_t compared = 0;  // non-silhouette beams where both paths hit
  std::size_t silhouette = 0;
  std::size_t label_mismatches = 0;  // among non-silhouette beams
  std::size_t silhouette_label_mismatches = 0;
  std::size_t bound_violations = 0;  // among compared beams
  double mean_abs_depth = 0.0;       // over compared beams
  double max_abs_depth = 0.0;
};

/// Runs one full revolution through both the render+sampler path and the
/// oracle at `sensor_pose`. Requires a zero-noise profile (ValidationError).
///
/// A beam is a silhouette beam when its sampled pixel's four corner rays, the
/// pixel-centre ray and the exact beam ray disagree on hit/miss, instance or
/// supporting plane, or when the footprint bound is undefined (grazing).
ParityReport compare_paths(const Scene& scene, const SpectralLibrary& library, const SensorProfile& profile,
                           const Pose& sensor_pose, const ParityOptions& options = {});

/// Table rows as CSV: table,label,count,depth_mean_m,depth_std_m,intensity_mean,intensity_std.
void write_parity_csv(const ParityReport& report, const std::filesystem::path& path);
/// Per-beam rows as CSV.
void write_parity_beams_csv(const ParityReport& report, const std::filesystem::path& path);
/// Human-readable tables: error by distance and error by surface material,
/// depth in centimeters and intensity in reflectance percent points.
std::string format_parity_tables(const ParityReport& report);

}  // namespace lidarsim
