// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/config.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lidarsim {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open config '{}'", path.string()));
  }
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Vec3 vec3(const json& node, const char* field) {
  if (!node.is_array() || node.size() != 3) {
    throw ParseError(fmt::format("{}: expected [x, y, z]", field));
  }
  return {node[0].get<double>(), node[1].get<double>(), node[2].get<double>()};
}

SensorProfile sensor_from_json(const json& node, const std::filesystem::path& base_dir) {
  SensorProfile p;
  if (node.contains("profile")) {
    auto file = std::filesystem::path(node.at("profile").get<std::string>());
    p = parse_sensor_profile_file(file.is_relative() ? base_dir / file : file);
  } else {
    const std::string preset = node.value("preset", std::string("os0-128"));
    if (preset == "os0-128") {
      p = SensorProfile::os0_128();
    } else if (preset != "custom") {
      throw ParseError(fmt::format("sensor.preset: unknown preset '{}'", preset));
    }
  }
  auto deg = [&](const char* key, double& target) {
    if (node.contains(key)) target = deg2rad(node.at(key).get<double>());
  };
  auto num = [&](const char* key, auto& target) {
    if (node.contains(key)) target = node.at(key).get<std::remove_reference_t<decltype(target)>>();
  };
  num("channels", p.channels);
  num("samples_per_rev", p.samples_per_rev);
  deg("fov_h_deg", p.fov_h);
  deg("fov_v_deg", p.fov_v);
  if (node.contains("elevations_deg")) {
    std::vector<double> table;
    for (const auto& v : node.at("elevations_deg")) {
      table.push_back(deg2rad(v.get<double>()));
    }
    p.elevation_table = std::move(table);
  }
  num("spin_rate_hz", p.spin_rate);
  num("wavelength_nm", p.wavelength_nm);
  num("width", p.width);
  deg("max_capture_fov_deg", p.max_capture_fov);
  deg("capture_margin_deg", p.capture_margin);
  num("d_max", p.d_max);
  num("r_l_max", p.r_l_max);
  num("noise_sigma", p.noise_sigma);
  num("noise_range_coeff", p.noise_range_coeff);
  num("seed", p.seed);
  return p;
}

}  // namespace

Trajectory::Trajectory(std::vector<TrajectoryKey> keys) : keys_(std::move(keys)) {
  for (std::size_t k = 1; k < keys_.size(); ++k) {
    if (!(keys_[k].time > keys_[k - 1].time)) {
      throw ValidationError(fmt::format("trajectory[{}]: times must be strictly increasing", k));
    }
  }
}

Pose Trajectory::at(double time) const {
  if (keys_.empty()) {
    return Pose::Identity();
  }
  if (time <= keys_.front().time) {
    return keys_.front().pose;
  }
  if (time >= keys_.back().time) {
    return keys_.back().pose;
  }
  const auto upper = std::upper_bound(keys_.begin(), keys_.end(), time,
                                      [](double t, const TrajectoryKey& k) { return t < k.time; });
  const auto& a = *(upper - 1);
  const auto& b = *upper;
  const double f = (time - a.time) / (b.time - a.time);
  const Eigen::Quaterniond qa(a.pose.linear());
  const Eigen::Quaterniond qb(b.pose.linear());
  Pose out = Pose::Identity();
  out.linear() = qa.slerp(f, qb).toRotationMatrix();
  out.translation() = (1.0 - f) * a.pose.translation() + f * b.pose.translation();
  return out;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("run config: " + msg); };
  if (!(duration > 0.0)) fail(fmt::format("duration {} s must be positive", duration));
  if (!(dt > 0.0)) fail(fmt::format("dt {} s must be positive", dt));
  if (scene.empty()) fail("scene path missing");
  if (!(default_reflectance >= 0.0 && default_reflectance <= 1.0)) {
    fail(fmt::format("default_reflectance {} outside [0, 1]", default_reflectance));
  }
  if (!(spectral_margin_nm >= 0.0)) fail("spectral_margin_nm must be non-negative");
  if (!(parity_bin_width > 0.0)) fail("parity bin width must be positive");
  if (output_dir.empty()) fail("output.dir missing");
  sensor.validate();
}

SensorProfile RunConfig::effective_profile() const {
  SensorProfile p = sensor;
  if (flags.zero_noise) {
    p.noise_sigma = 0.0;
    p.noise_range_coeff = 0.0;
  }
  return p;
}

SensorProfile parse_sensor_profile_file(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return sensor_from_json(doc, path.parent_path());
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json doc = read_json(path);
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_relative() ? base / fp : fp;
  };

  RunConfig cfg;
  try {
    cfg.scene = resolve(doc.at("scene").get<std::string>());
    const std::string scene_format = doc.value("scene_format", std::string("native"));
    if (scene_format == "native") {
      cfg.scene_format = SceneFormat::native_config;
    } else if (scene_format == "obj") {
      cfg.scene_format = SceneFormat::wavefront_mesh;
    } else {
      throw ParseError(fmt::format("scene_format: unknown value '{}'", scene_format));
    }
    if (doc.contains("materials")) {
      cfg.materials = resolve(doc.at("materials").get<std::string>());
    }
    cfg.default_reflectance = doc.value("default_reflectance", cfg.default_reflectance);
    cfg.spectral_margin_nm = doc.value("spectral_margin_nm", cfg.spectral_margin_nm);
    if (doc.contains("sensor")) {
      cfg.sensor = sensor_from_json(doc.at("sensor"), base);
    }
    if (doc.contains("seed")) {
      cfg.sensor.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("trajectory")) {
      std::vector<TrajectoryKey> keys;
      for (const auto& k : doc.at("trajectory")) {
        const Vec3 t = k.contains("translation") ? vec3(k.at("translation"), "trajectory.translation") : Vec3::Zero();
        const Vec3 rpy = k.contains("rpy_deg") ? vec3(k.at("rpy_deg"), "trajectory.rpy_deg") : Vec3::Zero();
        keys.push_back({k.value("t", 0.0), make_pose(t, rpy * (kPi / 180.0))});
      }
      cfg.trajectory = Trajectory(std::move(keys));
    }
    cfg.duration = doc.value("duration", cfg.duration);
    cfg.dt = doc.value("dt", cfg.dt);
    if (doc.contains("output")) {
      const json& out = doc.at("output");
      cfg.format = parse_cloud_format(out.value("format", std::string("ply")));
      cfg.output_dir = out.value("dir", cfg.output_dir.string());
      const std::string framing = out.value("framing", std::string("revolution"));
      if (framing == "revolution") {
        cfg.framing = Framing::revolution;
      } else if (framing == "tick") {
        cfg.framing = Framing::tick;
      } else {
        throw ParseError(fmt::format("output.framing: unknown value '{}'", framing));
      }
    }
    if (doc.contains("flags")) {
      const json& f = doc.at("flags");
      cfg.flags.use_24bit_depth = f.value("depth_24bit", false);
      cfg.flags.zero_noise = f.value("zero_noise", false);
      cfg.flags.parity_report = f.value("parity_report", false);
      cfg.flags.debug_buffers = f.value("debug_buffers", false);
    }
    cfg.parity_bin_width = doc.value("parity_bin_width", cfg.parity_bin_width);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  cfg.validate();
  return cfg;
}

}  // namespace lidarsim
