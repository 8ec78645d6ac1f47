// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/simulation.hpp"

#include "lidarsim/error.hpp"
#include "lidarsim/oracle.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

namespace lidarsim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct FrameAccumulator {
  FrameStats stats;
  std::vector<LidarPoint> points;
};

void write_instances(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << "instance_id,name,class_label\n0,none,none\n";
  for (const auto& [id, info] : scene.instance_table()) {
    out << id << ',' << info.name << ',' << info.class_label << '\n';
  }
}

void write_summary(const RunSummary& summary, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["ticks"] = summary.ticks;
  doc["frames"] = summary.frames.size();
  doc["total_beams"] = summary.total_beams;
  doc["kept"] = summary.kept;
  doc["dropped_beyond_max_range"] = summary.dropped_beyond_range;
  doc["dropped_below_capability"] = summary.dropped_below_capability;
  doc["missed"] = summary.missed;
  auto& frames = doc["frame_stats"] = nlohmann::ordered_json::array();
  for (const auto& f : summary.frames) {
    frames.push_back({{"frame", f.frame},
                      {"file", f.file.filename().string()},
                      {"columns", f.columns},
                      {"kept", f.kept},
                      {"dropped_beyond_max_range", f.dropped_beyond_range},
                      {"dropped_below_capability", f.dropped_below_capability},
                      {"missed", f.missed}});
  }
  doc["wall_seconds"] = summary.wall_seconds;
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

TickResult simulate_tick(const Scene& scene, const SpectralLibrary& library, const SensorProfile& profile,
                         const Pose& sensor_pose, double sweep_start, double t0, double dt, bool use_24bit) {
  TickResult result;
  result.plan = plan_captures(profile.spin_rate, dt, profile.fov_v, profile.capture_options(), sweep_start);
  result.frames.reserve(result.plan.captures.size());
  for (const auto& capture : result.plan.captures) {
    result.frames.push_back(rasterize(scene, sensor_pose, capture.yaw, capture.intrinsics, profile.d_max));
  }
  const auto beams = beam_table(profile, sweep_start, sweep_start + result.plan.covered_azimuth, t0, dt);
  result.raw = sample_buffers(beams, result.plan, result.frames, use_24bit);

  result.outcomes.resize(result.raw.size());
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, result.raw.size(), 4096),
                    [&](const tbb::blocked_range<std::size_t>& range) {
                      for (std::size_t k = range.begin(); k != range.end(); ++k) {
                        if (result.raw[k].hit) {
                          result.outcomes[k] = finalize(result.raw[k], library, profile);
                        }
                      }
                    });
  return result;
}

SpectralLibrary load_run_library(const RunConfig& config) {
  SpectralLibrary library = config.materials ? load_library(*config.materials) : SpectralLibrary{};
  library.set_default_reflectance(config.default_reflectance);
  library.set_margin_nm(config.spectral_margin_nm);
  return library;
}

Scene load_run_scene(const RunConfig& config, const SpectralLibrary& library) {
  Scene scene = load_scene(config.scene, config.scene_format);
  for (const auto& obj : scene.objects()) {
    if (!library.contains(obj.material_index)) {
      throw ValidationError(fmt::format("object '{}': material_index {} has no spectral library entry", obj.name,
                                        obj.material_index));
    }
    // Surfaces the range check at load time rather than mid-run.
    library.reflectance_at(obj.material_index, config.sensor.wavelength_nm);
  }
  if (!scene.triangles().empty()) {
    scene.build_bvh();
  }
  return scene;
}

RunSummary run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const SensorProfile profile = config.effective_profile();
  const SpectralLibrary library = load_run_library(config);
  const Scene scene = load_run_scene(config, library);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec || !std::filesystem::is_directory(config.output_dir)) {
    throw IoError(fmt::format("output.dir '{}' is not writable: {}", config.output_dir.string(), ec.message()));
  }
  write_instances(scene, config.output_dir / "instances.csv");

  RunSummary summary;
  std::map<std::int64_t, FrameAccumulator> open_frames;
  auto flush = [&](auto it) {
    FrameAccumulator& acc = it->second;
    acc.stats.file = config.output_dir / fmt::format("frame_{:06d}.{}", acc.stats.frame, extension(config.format));
    acc.stats.columns /= static_cast<std::size_t>(profile.channels);
    write_cloud(acc.points, config.format, acc.stats.file);
    summary.frames.push_back(acc.stats);
    open_frames.erase(it);
  };

  const double sweep = std::min(kTwoPi * profile.spin_rate * config.dt, kTwoPi);
  const auto ticks = static_cast<std::size_t>(std::ceil(config.duration / config.dt - 1e-9));
  for (std::size_t k = 0; k < ticks; ++k) {
    const double t0 = static_cast<double>(k) * config.dt;
    const double sweep_start = static_cast<double>(k) * sweep;
    const Pose pose = config.trajectory.at(t0);
    TickResult tick =
        simulate_tick(scene, library, profile, pose, sweep_start, t0, config.dt, config.flags.use_24bit_depth);

    if (config.flags.debug_buffers) {
      for (std::size_t c = 0; c < tick.frames.size(); ++c) {
        write_debug_images(tick.frames[c], config.output_dir / "debug", fmt::format("tick{:06d}_capture{}", k, c));
      }
    }

    for (std::size_t b = 0; b < tick.raw.size(); ++b) {
      const RawReturn& raw = tick.raw[b];
      const std::int64_t frame_id =
          config.framing == Framing::revolution ? raw.beam.revolution : static_cast<std::int64_t>(k);
      FrameAccumulator& acc = open_frames[frame_id];
      acc.stats.frame = frame_id;
      ++acc.stats.columns;  // beams for now; divided by channels on flush
      if (!tick.outcomes[b]) {
        ++acc.stats.missed;
      } else if (const auto* point = std::get_if<LidarPoint>(&*tick.outcomes[b])) {
        ++acc.stats.kept;
        acc.points.push_back(*point);
      } else if (std::get<DroppedReturn>(*tick.outcomes[b]).reason == DropReason::beyond_max_range) {
        ++acc.stats.dropped_beyond_range;
      } else {
        ++acc.stats.dropped_below_capability;
      }
    }
    ++summary.ticks;

    if (config.framing == Framing::tick) {
      while (!open_frames.empty()) {
        flush(open_frames.begin());
      }
    } else {
      const auto complete = static_cast<std::int64_t>(std::floor(static_cast<double>(k + 1) * sweep / kTwoPi + 1e-9));
      while (!open_frames.empty() && open_frames.begin()->first < complete) {
        flush(open_frames.begin());
      }
    }
  }
  while (!open_frames.empty()) {
    flush(open_frames.begin());
  }

  for (const auto& f : summary.frames) {
    summary.kept += f.kept;
    summary.dropped_beyond_range += f.dropped_beyond_range;
    summary.dropped_below_capability += f.dropped_below_capability;
    summary.missed += f.missed;
    summary.total_beams += f.total();
  }

  if (config.flags.parity_report) {
    SensorProfile zero = profile;
    zero.noise_sigma = 0.0;
    zero.noise_range_coeff = 0.0;
    const ParityReport report = compare_paths(scene, library, zero, config.trajectory.at(0.0),
                                              {config.flags.use_24bit_depth, config.parity_bin_width});
    write_parity_csv(report, config.output_dir / "parity.csv");
    std::ofstream(config.output_dir / "parity.txt") << format_parity_tables(report);
  }

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_summary(summary, config.output_dir / "summary.json");
  return summary;
}

}  // namespace lidarsim
