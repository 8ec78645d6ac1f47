// SPDX-License-Identifier: Apache-2.0
// lidarsim: simulate | parity | inspect-scene
#include "lidarsim/error.hpp"
#include "lidarsim/oracle.hpp"
#include "lidarsim/simulation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

lidarsim::RunConfig load_config(const std::string& path, const Overrides& overrides) {
  lidarsim::RunConfig config = lidarsim::load_run_config(path);
  if (overrides.seed) {
    config.sensor.seed = *overrides.seed;
  }
  if (overrides.output_dir) {
    config.output_dir = *overrides.output_dir;
  }
  return config;
}

int simulate(const std::string& config_path, const Overrides& overrides) {
  const auto config = load_config(config_path, overrides);
  const auto summary = lidarsim::run(config);
  for (const auto& f : summary.frames) {
    fmt::print("frame {:>4}  columns {:>5}  kept {:>7}  dropped {:>7} (range {}, capability {})  missed {:>7}  {}\n",
               f.frame, f.columns, f.kept, f.dropped(), f.dropped_beyond_range, f.dropped_below_capability,
               f.missed, f.file.string());
  }
  fmt::print("ticks {}  frames {}  beams {}  kept {}  dropped {}  missed {}  wall {:.3f} s\n", summary.ticks,
             summary.frames.size(), summary.total_beams, summary.kept,
             summary.dropped_beyond_range + summary.dropped_below_capability, summary.missed,
             summary.wall_seconds);
  return 0;
}

int parity(const std::string& config_path, const Overrides& overrides) {
  auto config = load_config(config_path, overrides);
  auto profile = config.effective_profile();
  profile.noise_sigma = 0.0;
  profile.noise_range_coeff = 0.0;
  const auto library = lidarsim::load_run_library(config);
  const auto scene = lidarsim::load_run_scene(config, library);
  const auto report = lidarsim::compare_paths(scene, library, profile, config.trajectory.at(0.0),
                                              {config.flags.use_24bit_depth, config.parity_bin_width});
  std::filesystem::create_directories(config.output_dir);
  lidarsim::write_parity_csv(report, config.output_dir / "parity.csv");
  lidarsim::write_parity_beams_csv(report, config.output_dir / "parity_beams.csv");
  const std::string tables = lidarsim::format_parity_tables(report);
  std::ofstream(config.output_dir / "parity.txt") << tables;
  std::cout << tables;
  return report.label_mismatches == 0 && report.bound_violations == 0 ? 0 : 2;
}

int inspect_scene(const std::string& config_path, const Overrides& overrides) {
  const auto config = load_config(config_path, overrides);
  const auto library = lidarsim::load_run_library(config);
  const auto scene = lidarsim::load_run_scene(config, library);
  for (const auto& w : scene.warnings()) {
    fmt::print(stderr, "warning: {}\n", w);
  }
  const auto bounds = scene.bounds();
  fmt::print("scene {}\n", config.scene.string());
  fmt::print("objects {}  triangles {}  bvh nodes {}\n", scene.objects().size(), scene.triangles().size(),
             scene.bvh().nodes().size());
  if (!bounds.empty()) {
    fmt::print("bounds [{:.3f}, {:.3f}, {:.3f}] - [{:.3f}, {:.3f}, {:.3f}]\n", bounds.lo.x(), bounds.lo.y(),
               bounds.lo.z(), bounds.hi.x(), bounds.hi.y(), bounds.hi.z());
  }
  fmt::print("\n{:>9}  {:<24} {:<16} {:>8} {:>9}  {}\n", "instance", "name", "class", "material", "R(0deg)",
             "material name");
  for (const auto& obj : scene.objects()) {
    const auto it = library.entries().find(obj.material_index);
    const std::string material_name = it != library.entries().end() ? it->second.display_name : "default";
    fmt::print("{:>9}  {:<24} {:<16} {:>8} {:>9.4f}  {}\n", obj.instance_id, obj.name, obj.class_label,
               obj.material_index, library.reflectance_at(obj.material_index, config.sensor.wavelength_nm),
               material_name);
  }
  fmt::print("\nreflectance at {} nm\n", config.sensor.wavelength_nm);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spinning multi-beam LiDAR simulator"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", overrides.seed, "Override the noise seed");
    cmd->add_option("--output-dir", overrides.output_dir, "Override the output directory");
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate point clouds for a run config");
  auto* parity_cmd = app.add_subcommand("parity", "Compare the raster path against the ray-cast oracle");
  auto* inspect_cmd = app.add_subcommand("inspect-scene", "Print the scene's objects, labels and materials");
  for (auto* cmd : {simulate_cmd, parity_cmd, inspect_cmd}) {
    add_common(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) {
      return simulate(config_path, overrides);
    }
    if (*parity_cmd) {
      return parity(config_path, overrides);
    }
    return inspect_scene(config_path, overrides);
  } catch (const lidarsim::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
