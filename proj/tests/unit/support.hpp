// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/scene.hpp"
#include "lidarsim/sampler.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(LIDARSIM_DATA_DIR) / rel;
}

// Fresh per-test scratch directory under the working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline lidarsim::SceneObject make_object(std::string name, lidarsim::Mesh mesh, lidarsim::Pose pose,
                                         std::uint32_t id = 0, int material = 0) {
  lidarsim::SceneObject o;
  o.name = std::move(name);
  o.class_label = "thing";
  o.instance_id = id;
  o.material_index = material;
  o.mesh = std::move(mesh);
  o.transform = pose;
  return o;
}

// Square plane of side `size` facing the sensor at distance `d` along +x.
inline lidarsim::Scene plane_scene(double d, double size = 200.0, int material = 0) {
  std::vector<lidarsim::SceneObject> objs;
  objs.push_back(make_object("wall", lidarsim::primitives::quad(size, size),
                             lidarsim::make_pose({d, 0, 0}, {0, 0, 0}), 1, material));
  auto s = lidarsim::Scene::from_objects(std::move(objs));
  s.build_bvh();
  return s;
}

// `n` random small triangles inside [-10, 10]^3, one object per 100.
inline lidarsim::Scene random_triangle_scene(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> off(-0.6, 0.6);
  std::vector<lidarsim::SceneObject> objs;
  for (std::size_t start = 0; start < n; start += 100) {
    lidarsim::Mesh m;
    for (std::size_t k = start; k < std::min(n, start + 100); ++k) {
      const lidarsim::Vec3 c(pos(rng), pos(rng), pos(rng));
      const auto base = static_cast<std::uint32_t>(m.vertices.size());
      for (int v = 0; v < 3; ++v) m.vertices.push_back(c + lidarsim::Vec3(off(rng), off(rng), off(rng)));
      m.faces.push_back({base, base + 1, base + 2});
    }
    objs.push_back(make_object("tri" + std::to_string(start), std::move(m), lidarsim::Pose::Identity(), 0,
                               static_cast<int>(start / 100 % 10)));
  }
  auto s = lidarsim::Scene::from_objects(std::move(objs));
  s.build_bvh();
  return s;
}

inline lidarsim::SensorProfile quiet_os0() {
  auto p = lidarsim::SensorProfile::os0_128();
  p.noise_sigma = 0.0;
  p.noise_range_coeff = 0.0;
  return p;
}

}  // namespace testing
