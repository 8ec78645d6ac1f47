// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/bvh.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace lidarsim {

namespace {

constexpr int kBinCount = 16;
constexpr int kStackSize = 128;
constexpr double kTraversalCost = 1.0;
constexpr double kIntersectCost = 1.0;

}  // namespace

Aabb WorldTriangle::bounds() const {
  Aabb b;
  for (const auto& p : v) {
    b.extend(p);
  }
  return b;
}

double WorldTriangle::area() const { return 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm(); }

Bvh::Bvh(std::span<const WorldTriangle> triangles, std::size_t max_leaf_size) {
  if (triangles.empty()) {
    return;
  }
  indices_.resize(triangles.size());
  std::iota(indices_.begin(), indices_.end(), 0U);
  std::vector<Vec3> centroids(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    centroids[i] = (triangles[i].v[0] + triangles[i].v[1] + triangles[i].v[2]) / 3.0;
  }
  nodes_.reserve(2 * triangles.size());
  build_recursive(triangles, centroids, 0, triangles.size(), std::max<std::size_t>(1, max_leaf_size));
}

std::uint32_t Bvh::build_recursive(std::span<const WorldTriangle> triangles,
                                   std::vector<Vec3>& centroids, std::size_t begin,
                                   std::size_t end, std::size_t max_leaf_size) {
  const auto node_index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb bounds;
  Aabb centroid_bounds;
  for (std::size_t i = begin; i < end; ++i) {
    bounds.extend(triangles[indices_[i]].bounds());
    centroid_bounds.extend(centroids[indices_[i]]);
  }
  nodes_[node_index].bounds = bounds;

  const std::size_t count = end - begin;
  auto make_leaf = [&] {
    nodes_[node_index].offset = static_cast<std::uint32_t>(begin);
    nodes_[node_index].count = static_cast<std::uint16_t>(count);
    return node_index;
  };
  if (count <= max_leaf_size) {
    return make_leaf();
  }

  const Vec3 extent = centroid_bounds.hi - centroid_bounds.lo;
  int axis = 0;
  extent.maxCoeff(&axis);
  if (extent[axis] <= 0.0) {
    // All centroids coincide; split in the middle of the index range.
    if (count <= 0xFFFF && count <= 4 * max_leaf_size) {
      return make_leaf();
    }
    const std::size_t mid = begin + count / 2;
    build_recursive(triangles, centroids, begin, mid, max_leaf_size);
    nodes_[node_index].offset = build_recursive(triangles, centroids, mid, end, max_leaf_size);
    nodes_[node_index].axis = static_cast<std::uint8_t>(axis);
    return node_index;
  }

  struct Bin {
    Aabb bounds;
    std::size_t count = 0;
  };
  std::array<Bin, kBinCount> bins{};
  const double scale = kBinCount / extent[axis];
  auto bin_of = [&](std::uint32_t tri) {
    const int b = static_cast<int>((centroids[tri][axis] - centroid_bounds.lo[axis]) * scale);
    return std::clamp(b, 0, kBinCount - 1);
  };
  for (std::size_t i = begin; i < end; ++i) {
    Bin& bin = bins[bin_of(indices_[i])];
    bin.bounds.extend(triangles[indices_[i]].bounds());
    ++bin.count;
  }

  std::array<double, kBinCount - 1> cost{};
  {
    Aabb left;
    std::size_t left_count = 0;
    for (int i = 0; i < kBinCount - 1; ++i) {
      left.extend(bins[i].bounds);
      left_count += bins[i].count;
      cost[i] = left_count * left.surface_area();
    }
    Aabb right;
    std::size_t right_count = 0;
    for (int i = kBinCount - 1; i > 0; --i) {
      right.extend(bins[i].bounds);
      right_count += bins[i].count;
      cost[i - 1] += right_count * right.surface_area();
    }
  }
  const auto best = std::min_element(cost.begin(), cost.end());
  const int split_bin = static_cast<int>(best - cost.begin());
  const double split_cost =
      kTraversalCost + kIntersectCost * *best / std::max(bounds.surface_area(), 1e-300);
  if (count <= max_leaf_size * 4 && split_cost >= kIntersectCost * count) {
    return make_leaf();
  }

  auto* first = indices_.data() + begin;
  auto* last = indices_.data() + end;
  auto* middle = std::partition(first, last, [&](std::uint32_t tri) { return bin_of(tri) <= split_bin; });
  std::size_t mid = begin + static_cast<std::size_t>(middle - first);
  if (mid == begin || mid == end) {
    mid = begin + count / 2;
    std::nth_element(first, indices_.data() + mid, last, [&](std::uint32_t a, std::uint32_t b) {
      return centroids[a][axis] < centroids[b][axis];
    });
  }

  build_recursive(triangles, centroids, begin, mid, max_leaf_size);
  nodes_[node_index].offset = build_recursive(triangles, centroids, mid, end, max_leaf_size);
  nodes_[node_index].axis = static_cast<std::uint8_t>(axis);
  return node_index;
}

std::optional<RayHit> Bvh::nearest_hit(const Ray& ray, std::span<const WorldTriangle> triangles,
                                       double t_max) const {
  if (nodes_.empty()) {
    return std::nullopt;
  }
  const PreparedRay prepared(ray);
  RayHit best;
  best.t = t_max;
  bool found = false;

  std::array<std::uint32_t, kStackSize> stack{};
  int top = 0;
  std::uint32_t current = 0;
  double t_entry = 0.0;
  if (!intersect_box(prepared, nodes_[0].bounds, best.t, t_entry)) {
    return std::nullopt;
  }

  while (true) {
    const Node& node = nodes_[current];
    if (node.is_leaf()) {
      for (std::uint32_t k = 0; k < node.count; ++k) {
        const std::uint32_t tri = indices_[node.offset + k];
        const WorldTriangle& t = triangles[tri];
        if (auto hit = intersect_triangle(prepared, t.v[0], t.v[1], t.v[2], best.t)) {
          best.t = hit->t;
          best.barycentric = hit->barycentric;
          best.triangle = tri;
          found = true;
        }
      }
      if (top == 0) {
        break;
      }
      current = stack[--top];
      continue;
    }

    std::uint32_t near_child = current + 1;
    std::uint32_t far_child = node.offset;
    if (prepared.direction[node.axis] < 0.0) {
      std::swap(near_child, far_child);
    }
    double t_near = 0.0;
    double t_far = 0.0;
    const bool hit_near = intersect_box(prepared, nodes_[near_child].bounds, best.t, t_near);
    const bool hit_far = intersect_box(prepared, nodes_[far_child].bounds, best.t, t_far);
    if (hit_near && hit_far) {
      if (t_far < t_near) {
        std::swap(near_child, far_child);
      }
      stack[top++] = far_child;
      current = near_child;
    } else if (hit_near) {
      current = near_child;
    } else if (hit_far) {
      current = far_child;
    } else {
      if (top == 0) {
        break;
      }
      current = stack[--top];
    }
  }
  if (!found) {
    return std::nullopt;
  }
  return best;
}

std::optional<RayHit> brute_force_nearest_hit(const Ray& ray,
                                              std::span<const WorldTriangle> triangles,
                                              double t_max) {
  const PreparedRay prepared(ray);
  std::optional<RayHit> best;
  double limit = t_max;
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const WorldTriangle& t = triangles[i];
    if (auto hit = intersect_triangle(prepared, t.v[0], t.v[1], t.v[2], limit)) {
      limit = hit->t;
      best = RayHit{hit->t, static_cast<std::uint32_t>(i), hit->barycentric};
    }
  }
  return best;
}

}  // namespace lidarsim
