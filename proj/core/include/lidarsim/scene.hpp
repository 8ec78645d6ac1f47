// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/bvh.hpp"
#include "lidarsim/geometry.hpp"
#include "lidarsim/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lidarsim {

inline constexpr std::uint32_t kNoInstance = 0;
inline constexpr std::uint32_t kMaxInstanceId = (1U << 24) - 1;
inline constexpr int kMaxMaterialIndex = 255;

struct SceneObject {
  std::string name;
  std::string class_label;
  std::uint32_t instance_id = kNoInstance;  // 0 = auto-assign on load
  int material_index = 0;                   // 0 = default material
  Mesh mesh;
  Pose transform = Pose::Identity();
};

struct InstanceInfo {
  std::string name;
  std::string class_label;

  bool operator==(const InstanceInfo&) const = default;
};

enum class SceneFormat { native_config, wavefront_mesh };

/// Nearest surface along a ray, resolved to object semantics.
struct SurfaceHit {
  double distance = kInfinity;
  std::uint32_t triangle = 0;
  Vec3 normal = Vec3::UnitZ();  // shading normal, unit
  Vec3 face_normal = Vec3::UnitZ();
  std::uint32_t instance_id = kNoInstance;
  std::uint8_t material_index = 0;
};

/// World geometry with per-object semantics. Immutable once `build_bvh` has run.
class Scene {
 public:
  Scene() = default;

  /// Validates ids and materials, assigns missing instance ids (1, 2, ... in
  /// order, skipping ids already declared), transforms meshes to world space
  /// and drops zero-area triangles with a warning.
  static Scene from_objects(std::vector<SceneObject> objects);

  /// Throws ValidationError when the scene has no triangles.
  void build_bvh();
  bool has_bvh() const { return !bvh_.empty(); }

  const std::vector<SceneObject>& objects() const { return objects_; }
  std::span<const WorldTriangle> triangles() const { return triangles_; }
  const Bvh& bvh() const { return bvh_; }
  const std::map<std::uint32_t, InstanceInfo>& instance_table() const { return instance_table_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  Aabb bounds() const;

  /// Instance id 0 resolves to ("none", "none"); unknown ids throw RangeError.
  InstanceInfo semantic_lookup(std::uint32_t instance_id) const;

  /// BVH nearest hit. Requires `build_bvh` unless the scene is empty.
  std::optional<SurfaceHit> intersect(const Ray& ray) const;
  /// All-triangle reference used for testing the BVH.
  std::optional<SurfaceHit> intersect_brute_force(const Ray& ray) const;

  SurfaceHit resolve(const RayHit& hit) const;

 private:
  std::vector<SceneObject> objects_;
  std::vector<WorldTriangle> triangles_;
  std::map<std::uint32_t, InstanceInfo> instance_table_;
  std::vector<std::string> warnings_;
  Bvh bvh_;
};

/// Loads a scene; relative mesh paths resolve against the file's directory.
Scene load_scene(const std::filesystem::path& path, SceneFormat format = SceneFormat::native_config);

}  // namespace lidarsim
