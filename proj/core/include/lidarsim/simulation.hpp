// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/config.hpp"
#include "lidarsim/physics.hpp"
#include "lidarsim/render.hpp"
#include "lidarsim/sampler.hpp"
#include "lidarsim/scene.hpp"
#include "lidarsim/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace lidarsim {

/// Everything produced for one simulation tick.
struct TickResult {
  CapturePlan plan;
  std::vector<FrameBuffers> frames;
  std::vector<RawReturn> raw;
  /// Parallel to `raw`; empty for misses.
  std::vector<std::optional<FinalizedReturn>> outcomes;
};

/// Renders the captures for the sweep [sweep_start, sweep_start + sweep of
/// one tick), samples every beam and finalizes the hits.
TickResult simulate_tick(const Scene& scene, const SpectralLibrary& library, const SensorProfile& profile,
                         const Pose& sensor_pose, double sweep_start, double t0, double dt, bool use_24bit);

struct FrameStats {
  std::int64_t frame = 0;
  std::size_t columns = 0;
  std::size_t kept = 0;
  std::size_t dropped_beyond_range = 0;
  std::size_t dropped_below_capability = 0;
  std::size_t missed = 0;
  std::filesystem::path file;

  std::size_t dropped() const { return dropped_beyond_range + dropped_below_capability; }
  std::size_t total() const { return kept + dropped() + missed; }
};

struct RunSummary {
  std::vector<FrameStats> frames;
  std::size_t ticks = 0;
  std::size_t kept = 0;
  std::size_t dropped_beyond_range = 0;
  std::size_t dropped_below_capability = 0;
  std::size_t missed = 0;
  std::size_t total_beams = 0;
  double wall_seconds = 0.0;
};

/// Loads inputs, simulates every tick, writes one cloud per frame plus
/// `instances.csv` and `summary.json` into the output directory.
RunSummary run(const RunConfig& config);

/// Spectral library for a run config: mapping when given, else default only.
SpectralLibrary load_run_library(const RunConfig& config);
/// Loaded scene with BVH; also checks every material resolves in `library`.
Scene load_run_scene(const RunConfig& config, const SpectralLibrary& library);

}  // namespace lidarsim
