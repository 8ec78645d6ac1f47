// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/scene.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace lidarsim {

namespace {

using nlohmann::json;

// Zero-area test relative to the longest edge, so it is scale independent.
bool is_degenerate(const std::array<Vec3, 3>& v) {
  const Vec3 e0 = v[1] - v[0];
  const Vec3 e1 = v[2] - v[0];
  const double cross = e0.cross(e1).norm();
  const double edge = std::max({e0.squaredNorm(), e1.squaredNorm(), (v[2] - v[1]).squaredNorm()});
  return !(cross > 1e-12 * edge) || edge == 0.0;
}

Mesh merge_groups(std::vector<ObjGroup> groups) {
  Mesh merged;
  const bool smooth = std::all_of(groups.begin(), groups.end(),
                                  [](const ObjGroup& g) { return g.mesh.has_vertex_normals(); });
  for (auto& g : groups) {
    const auto base = static_cast<std::uint32_t>(merged.vertices.size());
    merged.vertices.insert(merged.vertices.end(), g.mesh.vertices.begin(), g.mesh.vertices.end());
    if (smooth) {
      merged.vertex_normals.insert(merged.vertex_normals.end(), g.mesh.vertex_normals.begin(),
                                   g.mesh.vertex_normals.end());
    }
    for (const auto& f : g.mesh.faces) {
      merged.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
  }
  return merged;
}

Vec3 vec3_from(const json& node, const std::string& what) {
  if (!node.is_array() || node.size() != 3) {
    throw ParseError(fmt::format("{}: expected an array of three numbers", what));
  }
  return {node[0].get<double>(), node[1].get<double>(), node[2].get<double>()};
}

Mesh mesh_from_primitive(const json& prim, const std::string& what) {
  const auto type = prim.at("type").get<std::string>();
  if (type == "box") {
    return primitives::box(vec3_from(prim.at("size"), what + ".size"));
  }
  if (type == "quad") {
    return primitives::quad(prim.at("width").get<double>(), prim.at("height").get<double>());
  }
  if (type == "sphere") {
    return primitives::uv_sphere(prim.at("radius").get<double>(), prim.value("stacks", 16),
                                 prim.value("slices", 32));
  }
  throw ParseError(fmt::format("{}: unknown primitive type '{}'", what, type));
}

Scene load_native(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open scene file '{}'", path.string()));
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }

  const auto base_dir = path.parent_path();
  std::vector<SceneObject> objects;
  try {
    const auto& list = doc.at("objects");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const json& node = list[k];
      const std::string what = fmt::format("{}: objects[{}]", path.string(), k);
      SceneObject obj;
      obj.name = node.value("name", fmt::format("object{}", k));
      obj.class_label = node.value("class", std::string("unlabeled"));
      const long long instance = node.value("instance_id", 0LL);
      if (instance < 0 || instance > kMaxInstanceId) {
        throw ValidationError(fmt::format("{}: instance_id {} outside [1, {}]", what, instance, kMaxInstanceId));
      }
      obj.instance_id = static_cast<std::uint32_t>(instance);
      obj.material_index = node.value("material_index", 0);

      if (node.contains("mesh")) {
        auto mesh_path = std::filesystem::path(node.at("mesh").get<std::string>());
        if (mesh_path.is_relative()) {
          mesh_path = base_dir / mesh_path;
        }
        obj.mesh = merge_groups(read_obj(mesh_path));
      } else if (node.contains("primitive")) {
        obj.mesh = mesh_from_primitive(node.at("primitive"), what + ".primitive");
      } else {
        throw ParseError(fmt::format("{}: needs either 'mesh' or 'primitive'", what));
      }

      if (node.contains("pose")) {
        const json& pose = node.at("pose");
        const Vec3 t = pose.contains("translation") ? vec3_from(pose.at("translation"), what + ".pose.translation")
                                                    : Vec3::Zero();
        const Vec3 rpy = pose.contains("rpy_deg") ? vec3_from(pose.at("rpy_deg"), what + ".pose.rpy_deg")
                                                  : Vec3::Zero();
        obj.transform = make_pose(t, rpy * (kPi / 180.0));
      }
      objects.push_back(std::move(obj));
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return Scene::from_objects(std::move(objects));
}

Scene load_wavefront(const std::filesystem::path& path) {
  std::vector<SceneObject> objects;
  for (auto& group : read_obj(path)) {
    SceneObject obj;
    obj.name = group.name;
    obj.class_label = "mesh";
    int material = 0;
    const auto& m = group.material;
    const auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), material);
    if (ec == std::errc{} && ptr == m.data() + m.size()) {
      obj.material_index = material;
    }
    obj.mesh = std::move(group.mesh);
    objects.push_back(std::move(obj));
  }
  return Scene::from_objects(std::move(objects));
}

}  // namespace

Scene Scene::from_objects(std::vector<SceneObject> objects) {
  Scene scene;

  std::set<std::uint32_t> declared;
  for (const auto& obj : objects) {
    if (obj.material_index < 0 || obj.material_index > kMaxMaterialIndex) {
      throw ValidationError(fmt::format("object '{}': material_index {} outside [0, {}]", obj.name,
                                        obj.material_index, kMaxMaterialIndex));
    }
    if (obj.instance_id > kMaxInstanceId) {
      throw ValidationError(fmt::format("object '{}': instance_id {} exceeds 24 bits", obj.name, obj.instance_id));
    }
    if (obj.instance_id != kNoInstance && !declared.insert(obj.instance_id).second) {
      throw ValidationError(fmt::format("duplicate instance_id {} (object '{}')", obj.instance_id, obj.name));
    }
    if (obj.mesh.has_vertex_normals() && obj.mesh.vertex_normals.size() != obj.mesh.vertices.size()) {
      throw ValidationError(fmt::format("object '{}': vertex normal count mismatch", obj.name));
    }
    for (const auto& f : obj.mesh.faces) {
      for (auto idx : f) {
        if (idx >= obj.mesh.vertices.size()) {
          throw ValidationError(fmt::format("object '{}': face index {} out of range", obj.name, idx));
        }
      }
    }
  }

  std::uint32_t next_id = 1;
  for (auto& obj : objects) {
    if (obj.instance_id != kNoInstance) {
      continue;
    }
    while (declared.count(next_id) != 0) {
      ++next_id;
    }
    if (next_id > kMaxInstanceId) {
      throw ValidationError("ran out of 24-bit instance ids");
    }
    obj.instance_id = next_id;
    declared.insert(next_id);
  }

  for (std::size_t o = 0; o < objects.size(); ++o) {
    const SceneObject& obj = objects[o];
    scene.instance_table_.emplace(obj.instance_id, InstanceInfo{obj.name, obj.class_label});
    const Mat3 rotation = obj.transform.linear();
    std::size_t dropped = 0;
    for (std::size_t f = 0; f < obj.mesh.faces.size(); ++f) {
      const Face& face = obj.mesh.faces[f];
      WorldTriangle tri;
      for (int k = 0; k < 3; ++k) {
        tri.v[k] = obj.transform * obj.mesh.vertices[face[k]];
      }
      if (is_degenerate(tri.v)) {
        ++dropped;
        continue;
      }
      tri.normal = (tri.v[1] - tri.v[0]).cross(tri.v[2] - tri.v[0]).normalized();
      if (obj.mesh.has_vertex_normals()) {
        tri.smooth = true;
        for (int k = 0; k < 3; ++k) {
          tri.vertex_normals[k] = (rotation * obj.mesh.vertex_normals[face[k]]).normalized();
        }
      }
      tri.object = static_cast<std::uint32_t>(o);
      tri.face = static_cast<std::uint32_t>(f);
      scene.triangles_.push_back(tri);
    }
    if (dropped > 0) {
      scene.warnings_.push_back(
          fmt::format("object '{}': skipped {} degenerate triangle(s)", obj.name, dropped));
    }
  }
  scene.objects_ = std::move(objects);
  return scene;
}

void Scene::build_bvh() {
  if (triangles_.empty()) {
    throw ValidationError("cannot build a BVH over an empty scene");
  }
  bvh_ = Bvh(triangles_);
}

Aabb Scene::bounds() const {
  Aabb b;
  for (const auto& t : triangles_) {
    b.extend(t.bounds());
  }
  return b;
}

InstanceInfo Scene::semantic_lookup(std::uint32_t instance_id) const {
  if (instance_id == kNoInstance) {
    return {"none", "none"};
  }
  const auto it = instance_table_.find(instance_id);
  if (it == instance_table_.end()) {
    throw RangeError(fmt::format("unknown instance id {}", instance_id));
  }
  return it->second;
}

SurfaceHit Scene::resolve(const RayHit& hit) const {
  const WorldTriangle& tri = triangles_[hit.triangle];
  const SceneObject& obj = objects_[tri.object];
  SurfaceHit out;
  out.distance = hit.t;
  out.triangle = hit.triangle;
  out.face_normal = tri.normal;
  if (tri.smooth) {
    const Vec3 n = hit.barycentric[0] * tri.vertex_normals[0] + hit.barycentric[1] * tri.vertex_normals[1] +
                   hit.barycentric[2] * tri.vertex_normals[2];
    const double len = n.norm();
    out.normal = len > 0.0 ? Vec3(n / len) : tri.normal;
  } else {
    out.normal = tri.normal;
  }
  out.instance_id = obj.instance_id;
  out.material_index = static_cast<std::uint8_t>(obj.material_index);
  return out;
}

std::optional<SurfaceHit> Scene::intersect(const Ray& ray) const {
  if (triangles_.empty()) {
    return std::nullopt;
  }
  if (bvh_.empty()) {
    throw ValidationError("scene BVH has not been built");
  }
  if (auto hit = bvh_.nearest_hit(ray, triangles_)) {
    return resolve(*hit);
  }
  return std::nullopt;
}

std::optional<SurfaceHit> Scene::intersect_brute_force(const Ray& ray) const {
  if (auto hit = brute_force_nearest_hit(ray, triangles_)) {
    return resolve(*hit);
  }
  return std::nullopt;
}

Scene load_scene(const std::filesystem::path& path, SceneFormat format) {
  if (!std::filesystem::exists(path)) {
    throw IoError(fmt::format("scene file '{}' does not exist", path.string()));
  }
  return format == SceneFormat::native_config ? load_native(path) : load_wavefront(path);
}

}  // namespace lidarsim
