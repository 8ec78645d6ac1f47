// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

namespace lidarsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Pose = Eigen::Isometry3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Unit direction for azimuth `theta` (from +x towards +y) and elevation `phi`.
Vec3 spherical_direction(double theta, double phi);

/// Rigid pose from a translation and roll/pitch/yaw angles in radians (Z-Y-X order).
Pose make_pose(const Vec3& translation, const Vec3& rpy);

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit length
};

struct Aabb {
  Vec3 lo = Vec3::Constant(kInfinity);
  Vec3 hi = Vec3::Constant(-kInfinity);

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return (lo.array() > hi.array()).any(); }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
  }
  Vec3 centroid() const { return 0.5 * (lo + hi); }
  double surface_area() const;
};

/// Ray with precomputed reciprocal direction and the permutation used by the
/// watertight triangle test.
struct PreparedRay {
  explicit PreparedRay(const Ray& ray);

  Vec3 origin;
  Vec3 direction;
  Vec3 inv_direction;
  std::array<int, 3> axis;  // kx, ky, kz
  double shear_x;
  double shear_y;
  double shear_z;
};

/// Slab test, conservative by a few ulps so that no triangle touching the box
/// is culled.
bool intersect_box(const PreparedRay& ray, const Aabb& box, double t_max, double& t_entry);

struct TriangleHit {
  double t;
  std::array<double, 3> barycentric;  // weights of v0, v1, v2
};

/// Watertight ray/triangle intersection (Woop, Benthin, Wald). Two-sided.
/// Accepts hits with 0 < t < t_max.
std::optional<TriangleHit> intersect_triangle(const PreparedRay& ray, const Vec3& v0,
                                              const Vec3& v1, const Vec3& v2, double t_max);

}  // namespace lidarsim
