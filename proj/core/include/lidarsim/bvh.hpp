// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lidarsim {

/// World-space triangle with the object it belongs to.
struct WorldTriangle {
  std::array<Vec3, 3> v;
  Vec3 normal;                         // unit, from winding
  std::array<Vec3, 3> vertex_normals;  // valid when `smooth`
  bool smooth = false;
  std::uint32_t object = 0;  // index into Scene::objects()
  std::uint32_t face = 0;    // index into the object's mesh faces

  Aabb bounds() const;
  double area() const;
};

struct RayHit {
  double t = kInfinity;
  std::uint32_t triangle = 0;
  std::array<double, 3> barycentric{};
};

/// Binary bounding volume hierarchy, binned-SAH build, flattened depth-first.
class Bvh {
 public:
  struct Node {
    Aabb bounds;
    // Interior: index of the second child (first child is this index + 1).
    // Leaf: offset into the primitive index list.
    std::uint32_t offset = 0;
    std::uint16_t count = 0;  // > 0 for leaves
    std::uint8_t axis = 0;
    bool is_leaf() const { return count > 0; }
  };

  Bvh() = default;
  explicit Bvh(std::span<const WorldTriangle> triangles, std::size_t max_leaf_size = 4);

  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  /// Triangle indices in leaf order.
  const std::vector<std::uint32_t>& primitive_indices() const { return indices_; }
  Aabb root_bounds() const { return nodes_.empty() ? Aabb{} : nodes_.front().bounds; }

  std::optional<RayHit> nearest_hit(const Ray& ray, std::span<const WorldTriangle> triangles,
                                    double t_max = kInfinity) const;

 private:
  std::uint32_t build_recursive(std::span<const WorldTriangle> triangles,
                                std::vector<Vec3>& centroids, std::size_t begin,
                                std::size_t end, std::size_t max_leaf_size);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> indices_;
};

/// Reference nearest hit testing every triangle in index order.
std::optional<RayHit> brute_force_nearest_hit(const Ray& ray,
                                              std::span<const WorldTriangle> triangles,
                                              double t_max = kInfinity);

}  // namespace lidarsim
