// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/oracle.hpp"
#include "lidarsim/simulation.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

const std::string kData = LIDARSIM_DATA_DIR;

struct BenchWorld {
  lidarsim::Scene scene;
  lidarsim::SpectralLibrary library;
  lidarsim::SensorProfile profile = lidarsim::SensorProfile::os0_128();

  BenchWorld() {
    library = lidarsim::load_library(kData + "/spectra/mapping.csv");
    scene = lidarsim::load_scene(kData + "/scenes/bench_10k.json");
    scene.build_bvh();
  }
};

const BenchWorld& world() {
  static const BenchWorld w;
  return w;
}

// One OS0-128 revolution: four 1024x1024 captures, 131,072 beams.
void BM_FullRevolution(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state) {
    auto tick = lidarsim::simulate_tick(w.scene, w.library, w.profile, lidarsim::Pose::Identity(), 0.0, 0.0, 0.1,
                                        state.range(0) != 0);
    benchmark::DoNotOptimize(tick.outcomes.data());
  }
  state.counters["triangles"] = static_cast<double>(w.scene.triangles().size());
  state.counters["beams"] = 131072;
}
BENCHMARK(BM_FullRevolution)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_RasterizeCapture(benchmark::State& state) {
  const auto& w = world();
  const auto intr = lidarsim::make_intrinsics(static_cast<int>(state.range(0)), lidarsim::deg2rad(111.47));
  for (auto _ : state) {
    auto fb = lidarsim::rasterize(w.scene, lidarsim::Pose::Identity(), 0.3, intr, 50.0);
    benchmark::DoNotOptimize(fb.depth.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RasterizeCapture)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BvhNearestHit(benchmark::State& state) {
  const auto& w = world();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<lidarsim::Ray> rays(4096);
  for (auto& r : rays) {
    r.direction = lidarsim::Vec3(n(rng), n(rng), n(rng)).normalized();
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.scene.intersect(rays[k++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BvhNearestHit);

void BM_Parity(benchmark::State& state) {
  auto w = world();
  w.profile.noise_sigma = 0.0;
  for (auto _ : state) {
    auto report = lidarsim::compare_paths(w.scene, w.library, w.profile, lidarsim::Pose::Identity());
    benchmark::DoNotOptimize(report.mean_abs_depth);
  }
}
BENCHMARK(BM_Parity)->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
