// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lidarsim {

namespace {

constexpr double gamma_bound(int n) {
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
  return (n * eps) / (1 - n * eps);
}

}  // namespace

Vec3 spherical_direction(double theta, double phi) {
  const double cp = std::cos(phi);
  return {cp * std::cos(theta), cp * std::sin(theta), std::sin(phi)};
}

Pose make_pose(const Vec3& translation, const Vec3& rpy) {
  Pose pose = Pose::Identity();
  pose.linear() = (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                   Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                   Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
                      .toRotationMatrix();
  pose.translation() = translation;
  return pose;
}

double Aabb::surface_area() const {
  if (empty()) {
    return 0.0;
  }
  const Vec3 d = hi - lo;
  return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
}

PreparedRay::PreparedRay(const Ray& ray) : origin(ray.origin), direction(ray.direction) {
  inv_direction = direction.cwiseInverse();

  int kz = 0;
  direction.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  // Keep the winding of the projected triangle consistent.
  if (direction[kz] < 0.0) {
    std::swap(kx, ky);
  }
  axis = {kx, ky, kz};
  shear_x = direction[kx] / direction[kz];
  shear_y = direction[ky] / direction[kz];
  shear_z = 1.0 / direction[kz];
}

bool intersect_box(const PreparedRay& ray, const Aabb& box, double t_max, double& t_entry) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double t_near = (box.lo[a] - ray.origin[a]) * ray.inv_direction[a];
    double t_far = (box.hi[a] - ray.origin[a]) * ray.inv_direction[a];
    if (t_near > t_far) {
      std::swap(t_near, t_far);
    }
    t_far *= 1.0 + 2.0 * gamma_bound(3);
    // NaN (0 * inf) leaves the running interval untouched.
    t0 = t_near > t0 ? t_near : t0;
    t1 = t_far < t1 ? t_far : t1;
    if (t0 > t1) {
      return false;
    }
  }
  t_entry = t0;
  return true;
}

std::optional<TriangleHit> intersect_triangle(const PreparedRay& ray, const Vec3& v0,
                                              const Vec3& v1, const Vec3& v2, double t_max) {
  const auto [kx, ky, kz] = ray.axis;

  const Vec3 a = v0 - ray.origin;
  const Vec3 b = v1 - ray.origin;
  const Vec3 c = v2 - ray.origin;

  const double ax = a[kx] - ray.shear_x * a[kz];
  const double ay = a[ky] - ray.shear_y * a[kz];
  const double bx = b[kx] - ray.shear_x * b[kz];
  const double by = b[ky] - ray.shear_y * b[kz];
  const double cx = c[kx] - ray.shear_x * c[kz];
  const double cy = c[ky] - ray.shear_y * c[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;

  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) {
    return std::nullopt;
  }
  const double det = u + v + w;
  if (det == 0.0) {
    return std::nullopt;
  }

  const double az = ray.shear_z * a[kz];
  const double bz = ray.shear_z * b[kz];
  const double cz = ray.shear_z * c[kz];
  const double t_scaled = u * az + v * bz + w * cz;

  if (det < 0.0 && (t_scaled >= 0.0 || t_scaled <= t_max * det)) {
    return std::nullopt;
  }
  if (det > 0.0 && (t_scaled <= 0.0 || t_scaled >= t_max * det)) {
    return std::nullopt;
  }

  const double inv_det = 1.0 / det;
  return TriangleHit{t_scaled * inv_det, {u * inv_det, v * inv_det, w * inv_det}};
}

}  // namespace lidarsim
