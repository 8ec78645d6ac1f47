// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/cloud_io.hpp"
#include "lidarsim/geometry.hpp"
#include "lidarsim/sampler.hpp"
#include "lidarsim/scene.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace lidarsim {

struct TrajectoryKey {
  double time = 0.0;
  Pose pose = Pose::Identity();
};

/// Time-ordered sensor poses. Translation is interpolated linearly and
/// rotation by slerp; queries outside the keyed interval clamp to the ends.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectoryKey> keys);

  const std::vector<TrajectoryKey>& keys() const { return keys_; }
  Pose at(double time) const;

 private:
  std::vector<TrajectoryKey> keys_;
};

enum class Framing { revolution, tick };

struct RunFlags {
  bool use_24bit_depth = false;
  bool zero_noise = false;
  bool parity_report = false;
  bool debug_buffers = false;
};

struct RunConfig {
  std::filesystem::path scene;
  SceneFormat scene_format = SceneFormat::native_config;
  std::optional<std::filesystem::path> materials;  // mapping table
  double default_reflectance = 0.5;
  double spectral_margin_nm = 25.0;
  SensorProfile sensor = SensorProfile::os0_128();
  Trajectory trajectory;
  double duration = 0.1;
  double dt = 0.1;
  CloudFormat format = CloudFormat::ply;
  std::filesystem::path output_dir = "lidarsim_out";
  Framing framing = Framing::revolution;
  RunFlags flags;
  double parity_bin_width = 5.0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  /// The sensor profile with noise zeroed when `flags.zero_noise` is set.
  SensorProfile effective_profile() const;
};

/// Reads a JSON run config. Input paths resolve against the config file's
/// directory; `output.dir` is taken as given.
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses a sensor profile object (optionally starting from a named preset).
SensorProfile parse_sensor_profile_file(const std::filesystem::path& path);

}  // namespace lidarsim
