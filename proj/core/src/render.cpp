// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/render.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lidarsim {

namespace {

constexpr int kMaxCaptures = 4096;

void write_pnm(const std::filesystem::path& path, const char* magic, int width, int height,
               const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << magic << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

CameraIntrinsics make_intrinsics(int width, double fov) {
  if (width < 64 || width % 2 != 0) {
    throw RangeError(fmt::format("camera width {} must be even and >= 64", width));
  }
  if (!(fov > 0.0 && fov < kPi)) {
    throw RangeError(fmt::format("camera FOV {} rad must lie in (0, pi)", fov));
  }
  CameraIntrinsics intr;
  intr.width = width;
  intr.fov = fov;
  intr.fx = width / (2.0 * std::tan(fov / 2.0));
  intr.fy = intr.fx;
  intr.cu = width / 2.0;
  intr.cv = width / 2.0;
  return intr;
}

Vec3 pixel_direction(const CameraIntrinsics& intr, double u, double v) {
  return Vec3(1.0, (u - intr.cu) / intr.fx, -(v - intr.cv) / intr.fy).normalized();
}

Mat3 capture_rotation(double yaw) { return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(); }

std::size_t CapturePlan::capture_for_offset(double offset) const {
  if (captures.empty()) {
    throw RangeError("empty capture plan");
  }
  const double share = covered_azimuth / static_cast<double>(captures.size());
  const auto k = static_cast<long>(std::floor(offset / share));
  return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(captures.size()) - 1));
}

double required_capture_fov(double share, double sensor_fov_v) {
  const double vertical = 2.0 * std::atan(std::tan(sensor_fov_v / 2.0) / std::cos(share / 2.0));
  return std::max(share, vertical);
}

CapturePlan plan_captures(double spin_rate, double dt, double sensor_fov_v, const CaptureOptions& options,
                          double sweep_start) {
  if (!(spin_rate > 0.0)) {
    throw RangeError(fmt::format("spin rate {} Hz must be positive", spin_rate));
  }
  if (!(dt > 0.0)) {
    throw RangeError(fmt::format("tick dt {} s must be positive", dt));
  }
  if (!(options.max_capture_fov > 0.0 && options.max_capture_fov <= 0.9 * kPi)) {
    throw RangeError(fmt::format("max capture FOV {} rad outside (0, 0.9 pi]", options.max_capture_fov));
  }
  if (!(sensor_fov_v > 0.0) || sensor_fov_v >= options.max_capture_fov ||
      sensor_fov_v + options.margin > options.max_capture_fov) {
    throw RangeError(fmt::format("sensor vertical FOV {} rad (+ margin {}) does not fit max capture FOV {} rad",
                                 sensor_fov_v, options.margin, options.max_capture_fov));
  }

  const double sweep = std::min(2.0 * kPi * spin_rate * dt, 2.0 * kPi);
  int count = std::max(1, static_cast<int>(std::ceil(sweep / options.max_capture_fov)));
  double fov = 0.0;
  for (;; ++count) {
    if (count > kMaxCaptures) {
      throw RangeError("capture plan does not converge; raise max_capture_fov");
    }
    fov = required_capture_fov(sweep / count, sensor_fov_v) + options.margin;
    if (fov <= options.max_capture_fov) {
      break;
    }
  }

  CapturePlan plan;
  plan.sweep_start = sweep_start;
  plan.covered_azimuth = sweep;
  const double share = sweep / count;
  const CameraIntrinsics intr = make_intrinsics(options.width, fov);
  for (int k = 0; k < count; ++k) {
    Capture c;
    c.azimuth_begin = sweep_start + k * share;
    c.azimuth_span = share;
    c.yaw = c.azimuth_begin + 0.5 * share;
    c.intrinsics = intr;
    plan.captures.push_back(c);
  }
  return plan;
}

double FrameBuffers::read_depth(std::size_t idx, bool use_24bit) const {
  const double d = depth[idx];
  if (use_24bit && std::isfinite(d) && d <= depth_range) {
    return decode_depth_24(depth24[idx], depth_range);
  }
  return d;
}

double FrameBuffers::read_incidence(std::size_t idx, bool use_24bit) const {
  return use_24bit ? decode_incidence_rgba(incidence_rgba[idx]).angle : incidence[idx];
}

std::uint8_t FrameBuffers::read_material(std::size_t idx, bool use_24bit) const {
  return use_24bit ? incidence_rgba[idx][3] : material[idx];
}

FrameBuffers rasterize(const Scene& scene, const Pose& sensor_pose, double yaw, const CameraIntrinsics& intr,
                       double depth_range) {
  if (!scene.triangles().empty() && !scene.has_bvh()) {
    throw ValidationError("rasterize: scene BVH has not been built");
  }
  FrameBuffers fb;
  fb.intrinsics = intr;
  fb.yaw = yaw;
  fb.sensor_pose = sensor_pose;
  fb.depth_range = depth_range;

  const int w = intr.width;
  const auto n = static_cast<std::size_t>(w) * w;
  fb.depth.assign(n, kInfinity);
  fb.depth24.assign(n, Rgb8{0, 0, 0});
  fb.incidence.assign(n, 0.0);
  fb.incidence_rgba.assign(n, Rgba8{0, 0, 0, 0});
  fb.material.assign(n, 0);
  fb.instance.assign(n, kNoInstance);
  fb.triangle.assign(n, 0);
  if (scene.triangles().empty()) {
    return fb;
  }

  const Mat3 to_world = sensor_pose.linear() * capture_rotation(yaw);
  const Vec3 origin = sensor_pose.translation();

  tbb::parallel_for(tbb::blocked_range<int>(0, w), [&](const tbb::blocked_range<int>& rows) {
    for (int y = rows.begin(); y != rows.end(); ++y) {
      for (int x = 0; x < w; ++x) {
        const Ray ray{origin, to_world * pixel_direction(intr, x, y)};
        const auto hit = scene.intersect(ray);
        if (!hit) {
          continue;
        }
        const std::size_t idx = fb.index(x, y);
        const double cos_incidence = std::min(1.0, std::abs(hit->normal.dot(ray.direction)));
        const double incidence = std::acos(cos_incidence);
        fb.depth[idx] = hit->distance;
        if (hit->distance <= depth_range) {
          fb.depth24[idx] = encode_depth_24(hit->distance, depth_range);
        }
        fb.incidence[idx] = incidence;
        fb.incidence_rgba[idx] = encode_incidence_rgba(incidence, hit->material_index);
        fb.material[idx] = hit->material_index;
        fb.instance[idx] = hit->instance_id;
        fb.triangle[idx] = hit->triangle;
      }
    }
  });
  return fb;
}

void write_debug_images(const FrameBuffers& frames, const std::filesystem::path& directory,
                        const std::string& stem) {
  std::filesystem::create_directories(directory);
  const int w = frames.width();
  const std::size_t n = frames.depth.size();

  double max_depth = 0.0;
  for (double d : frames.depth) {
    if (std::isfinite(d)) {
      max_depth = std::max(max_depth, d);
    }
  }
  std::vector<std::uint8_t> depth(n, 0);
  std::vector<std::uint8_t> incidence(n, 0);
  std::vector<std::uint8_t> instance(3 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!frames.is_hit(i)) {
      continue;
    }
    // Near is bright, misses stay black.
    depth[i] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - frames.depth[i] / (max_depth + 1e-12))));
    incidence[i] = static_cast<std::uint8_t>(std::lround(255.0 * frames.incidence[i] / (kPi / 2.0)));
    const Rgb8 rgb = pack24(frames.instance[i]);
    std::copy(rgb.begin(), rgb.end(), instance.begin() + 3 * static_cast<std::ptrdiff_t>(i));
  }
  write_pnm(directory / (stem + "_depth.pgm"), "P5", w, w, depth);
  write_pnm(directory / (stem + "_incidence.pgm"), "P5", w, w, incidence);
  write_pnm(directory / (stem + "_material.pgm"), "P5", w, w, frames.material);
  write_pnm(directory / (stem + "_instance.ppm"), "P6", w, w, instance);
}

}  // namespace lidarsim
