// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/oracle.hpp"

#include "lidarsim/error.hpp"
#include "lidarsim/render.hpp"

#include <fmt/format.h>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>

namespace lidarsim {

namespace {

constexpr double kGrazingSlack = 1e-6;

bool same_plane(const WorldTriangle& a, const WorldTriangle& b) {
  if (&a == &b) {
    return true;
  }
  if (std::abs(a.normal.dot(b.normal)) < 1.0 - 1e-12) {
    return false;
  }
  const double scale = 1.0 + a.v[0].norm();
  return std::abs(a.normal.dot(b.v[0] - a.v[0])) <= 1e-9 * scale;
}

struct Accumulator {
  std::size_t n = 0;
  double depth_sum = 0.0;
  double depth_sq = 0.0;
  double intensity_sum = 0.0;
  double intensity_sq = 0.0;

  void add(double depth, double intensity) {
    ++n;
    depth_sum += depth;
    depth_sq += depth * depth;
    intensity_sum += intensity;
    intensity_sq += intensity * intensity;
  }

  ParityGroup finish(std::string label) const {
    ParityGroup g;
    g.label = std::move(label);
    g.count = n;
    if (n == 0) {
      return g;
    }
    const double inv = 1.0 / static_cast<double>(n);
    g.depth_mean = depth_sum * inv;
    g.depth_std = std::sqrt(std::max(0.0, depth_sq * inv - g.depth_mean * g.depth_mean));
    g.intensity_mean = intensity_sum * inv;
    g.intensity_std = std::sqrt(std::max(0.0, intensity_sq * inv - g.intensity_mean * g.intensity_mean));
    return g;
  }
};

OracleHit to_oracle_hit(const SurfaceHit& hit, const Vec3& direction) {
  OracleHit o;
  o.depth = hit.distance;
  o.incidence = std::acos(std::min(1.0, std::abs(hit.normal.dot(direction))));
  o.face_incidence = std::acos(std::min(1.0, std::abs(hit.face_normal.dot(direction))));
  o.material_index = hit.material_index;
  o.instance_id = hit.instance_id;
  o.triangle = hit.triangle;
  return o;
}

}  // namespace

std::optional<OracleHit> cast_ray(const Scene& scene, const Ray& ray) {
  if (auto hit = scene.intersect(ray)) {
    return to_oracle_hit(*hit, ray.direction);
  }
  return std::nullopt;
}

std::optional<OracleHit> cast_beam(const Scene& scene, const Pose& sensor_pose, double theta, double phi) {
  const Ray ray{sensor_pose.translation(), sensor_pose.linear() * spherical_direction(theta, phi)};
  return cast_ray(scene, ray);
}

ParityReport compare_paths(const Scene& scene, const SpectralLibrary& library, const SensorProfile& profile,
                           const Pose& sensor_pose, const ParityOptions& options) {
  profile.validate();
  if (profile.noise_sigma != 0.0 || profile.noise_range_coeff != 0.0) {
    throw ValidationError("parity comparison requires a zero-noise profile");
  }
  if (!(options.distance_bin_width > 0.0)) {
    throw ValidationError("distance bin width must be positive");
  }

  ParityReport report;
  const double revolution_time = 1.0 / profile.spin_rate;
  const CapturePlan plan =
      plan_captures(profile.spin_rate, revolution_time, profile.fov_v, profile.capture_options(), 0.0);
  std::vector<FrameBuffers> frames;
  frames.reserve(plan.captures.size());
  for (const auto& capture : plan.captures) {
    frames.push_back(rasterize(scene, sensor_pose, capture.yaw, capture.intrinsics, profile.d_max));
  }
  const auto beams = beam_table(profile, 0.0, plan.covered_azimuth, 0.0, revolution_time);
  const auto raw = sample_buffers(beams, plan, frames, options.use_24bit);

  const double quantum = options.use_24bit ? profile.d_max / static_cast<double>(kMax24) : 0.0;
  const auto triangles = scene.triangles();
  const Vec3 origin = sensor_pose.translation();

  report.beams.resize(raw.size());
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, raw.size(), 1024), [&](const tbb::blocked_range<std::size_t>& range) {
    for (std::size_t k = range.begin(); k != range.end(); ++k) {
      const RawReturn& r = raw[k];
      BeamParity& p = report.beams[k];
      p.column = r.beam.column;
      p.channel = r.beam.channel;

      const Vec3 beam_dir = sensor_pose.linear() * spherical_direction(r.beam.azimuth, r.beam.elevation);
      const Capture& capture = plan.captures[r.capture];
      const Mat3 to_world = sensor_pose.linear() * capture_rotation(capture.yaw);
      const Vec3 centre_dir = to_world * pixel_direction(capture.intrinsics, r.pixel_x, r.pixel_y);
      p.pixel_offset = std::acos(std::clamp(beam_dir.dot(centre_dir), -1.0, 1.0));

      // Hits that must agree for the footprint bound to be meaningful.
      std::array<std::optional<SurfaceHit>, 6> probes;
      probes[0] = scene.intersect(Ray{origin, beam_dir});
      probes[1] = scene.intersect(Ray{origin, centre_dir});
      std::optional<OracleHit> oracle;
      if (probes[0]) {
        oracle = to_oracle_hit(*probes[0], beam_dir);
      }
      int slot = 2;
      for (double du : {-0.5, 0.5}) {
        for (double dv : {-0.5, 0.5}) {
          probes[slot++] = scene.intersect(
              Ray{origin, to_world * pixel_direction(capture.intrinsics, r.pixel_x + du, r.pixel_y + dv)});
        }
      }
      bool silhouette = false;
      for (std::size_t q = 1; q < probes.size(); ++q) {
        const auto& a = probes[0];
        const auto& b = probes[q];
        if (a.has_value() != b.has_value()) {
          silhouette = true;
        } else if (a && (a->instance_id != b->instance_id ||
                         !same_plane(triangles[a->triangle], triangles[b->triangle]))) {
          silhouette = true;
        }
      }

      p.raster_hit = r.hit;
      p.oracle_hit = oracle.has_value();
      if (r.hit) {
        p.raster_depth = r.depth;
        p.raster_instance = r.instance_id;
        p.raster_material = r.material_index;
      }
      if (oracle) {
        p.oracle_depth = oracle->depth;
        p.oracle_instance = oracle->instance_id;
        p.oracle_material = oracle->material_index;
      }
      if (r.hit && oracle) {
        p.delta_depth = std::abs(r.depth - oracle->depth);
        p.delta_incidence = std::abs(r.incidence - oracle->incidence);
        const double r0_raster = library.reflectance_at(r.material_index, profile.wavelength_nm);
        const double r0_oracle = library.reflectance_at(oracle->material_index, profile.wavelength_nm);
        p.delta_intensity = std::abs(lambertian_intensity(r0_raster, r.incidence) -
                                     lambertian_intensity(r0_oracle, oracle->incidence));
        const double worst = oracle->face_incidence + p.pixel_offset;
        if (worst >= kPi / 2.0 - kGrazingSlack) {
          silhouette = true;
          p.footprint_bound = kInfinity;
        } else {
          p.footprint_bound = oracle->depth * (std::cos(oracle->face_incidence) / std::cos(worst) - 1.0) +
                              quantum + 1e-9 * oracle->depth;
        }
      }
      p.silhouette = silhouette;
    }
  });

  report.total_beams = report.beams.size();
  std::map<long, Accumulator> by_distance;
  std::map<int, Accumulator> by_material;
  double depth_sum = 0.0;
  for (const auto& p : report.beams) {
    if (p.silhouette) {
      ++report.silhouette;
      if (p.label_mismatch()) {
        ++report.silhouette_label_mismatches;
      }
      continue;
    }
    if (p.label_mismatch()) {
      ++report.label_mismatches;
    }
    if (!(p.raster_hit && p.oracle_hit)) {
      continue;
    }
    ++report.compared;
    if (!p.within_bound()) {
      ++report.bound_violations;
    }
    depth_sum += p.delta_depth;
    report.max_abs_depth = std::max(report.max_abs_depth, p.delta_depth);
    by_distance[static_cast<long>(std::floor(p.oracle_depth / options.distance_bin_width))].add(p.delta_depth,
                                                                                                p.delta_intensity);
    by_material[p.oracle_material].add(p.delta_depth, p.delta_intensity);
  }
  report.mean_abs_depth = report.compared > 0 ? depth_sum / static_cast<double>(report.compared) : 0.0;

  for (const auto& [bin, acc] : by_distance) {
    const double lo = static_cast<double>(bin) * options.distance_bin_width;
    report.by_distance.push_back(acc.finish(fmt::format("{:g}-{:g} m", lo, lo + options.distance_bin_width)));
  }
  for (const auto& [material, acc] : by_material) {
    std::string label = "default";
    if (const auto it = library.entries().find(material); it != library.entries().end()) {
      label = it->second.display_name;
    } else if (material != 0) {
      label = fmt::format("material {}", material);
    }
    report.by_material.push_back(acc.finish(std::move(label)));
  }
  return report;
}

void write_parity_csv(const ParityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << "table,label,count,depth_mean_m,depth_std_m,intensity_mean,intensity_std\n";
  auto rows = [&](const char* table, const std::vector<ParityGroup>& groups) {
    for (const auto& g : groups) {
      out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", table, g.label, g.count, g.depth_mean,
                         g.depth_std, g.intensity_mean, g.intensity_std);
    }
  };
  rows("distance", report.by_distance);
  rows("material", report.by_material);
}

void write_parity_beams_csv(const ParityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << "column,channel,raster_hit,oracle_hit,raster_depth,oracle_depth,delta_depth,footprint_bound,"
         "delta_incidence,delta_intensity,raster_instance,oracle_instance,raster_material,oracle_material,"
         "silhouette\n";
  for (const auto& p : report.beams) {
    out << fmt::format("{},{},{:d},{:d},{:.6f},{:.6f},{:.9f},{:.9f},{:.9f},{:.9f},{},{},{},{},{:d}\n", p.column,
                       p.channel, p.raster_hit, p.oracle_hit, p.raster_depth, p.oracle_depth, p.delta_depth,
                       p.footprint_bound, p.delta_incidence, p.delta_intensity, p.raster_instance,
                       p.oracle_instance, p.raster_material, p.oracle_material, p.silhouette);
  }
}

std::string format_parity_tables(const ParityReport& report) {
  std::string out;
  auto table = [&](const char* title, const char* key, const std::vector<ParityGroup>& groups) {
    out += fmt::format("{}\n", title);
    out += fmt::format("{:<18}|{:>8} |{:^23}|{:^23}\n", "", "", "Depth Error (cm)", "Intensity Error (%)");
    out += fmt::format("{:<18}|{:>8} |{:>11}{:>12}|{:>11}{:>12}\n", key, "Beams", "Mean", "Std Dev", "Mean",
                       "Std Dev");
    out += std::string(18, '-') + '+' + std::string(9, '-') + '+' + std::string(23, '-') + '+' +
           std::string(23, '-') + '\n';
    for (const auto& g : groups) {
      out += fmt::format("{:<18}|{:>8} |{:>11.4f}{:>12.4f}|{:>11.4f}{:>12.4f}\n", g.label, g.count,
                         100.0 * g.depth_mean, 100.0 * g.depth_std, 100.0 * g.intensity_mean,
                         100.0 * g.intensity_std);
    }
    out += '\n';
  };
  table("Error by distance to objects", "Distance", report.by_distance);
  table("Error by surface material", "Material", report.by_material);
  out += fmt::format(
      "beams {}  compared {}  silhouette {}  label mismatches {} (silhouette {})  bound violations {}  "
      "mean |d depth| {:.6f} m  max |d depth| {:.6f} m\n",
      report.total_beams, report.compared, report.silhouette, report.label_mismatches,
      report.silhouette_label_mismatches, report.bound_violations, report.mean_abs_depth, report.max_abs_depth);
  return out;
}

}  // namespace lidarsim
