// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/error.hpp"
#include "lidarsim/render.hpp"
#include "unit/support.hpp"

#include <doctest.h>

#include <random>

using namespace lidarsim;

TEST_CASE("intrinsics") {
  const auto a = make_intrinsics(1024, deg2rad(90.0));
  CHECK(a.fx == doctest::Approx(512.0).epsilon(1e-12));
  CHECK(a.fy == a.fx);
  CHECK(a.cu == 512.0);
  CHECK(a.cv == 512.0);
  // 1024 / (2 tan 30 deg)
  CHECK(make_intrinsics(1024, deg2rad(60.0)).fx == doctest::Approx(886.8100134752652).epsilon(1e-12));
  CHECK_THROWS_AS(make_intrinsics(1024, kPi), RangeError);
  CHECK_THROWS_AS(make_intrinsics(1023, 1.0), RangeError);
  CHECK_THROWS_AS(make_intrinsics(32, 1.0), RangeError);
}

TEST_CASE("required FOV accounts for the corner of the frustum") {
  // 2 atan(tan 45 / cos 45) = 109.47122063449069 deg
  CHECK(rad2deg(required_capture_fov(deg2rad(90), deg2rad(90))) == doctest::Approx(109.47122063449069));
  CHECK(required_capture_fov(deg2rad(60), deg2rad(10)) == doctest::Approx(deg2rad(60)));
}

TEST_CASE("capture plans") {
  const double fov_v = deg2rad(90.0);
  SUBCASE("OS0 profile cap: four captures per revolution, one per quarter") {
    const CaptureOptions o{1024, deg2rad(115.0), deg2rad(2.0)};
    const auto full = plan_captures(10.0, 0.1, fov_v, o);
    CHECK(full.captures.size() == 4);
    CHECK(rad2deg(full.captures[0].intrinsics.fov) == doctest::Approx(111.47122063449069));
    const auto quarter = plan_captures(10.0, 0.025, fov_v, o);
    CHECK(quarter.captures.size() == 1);
  }
  SUBCASE("100 degree cap") {
    const CaptureOptions o{1024, deg2rad(100.0), deg2rad(2.0)};
    CHECK(plan_captures(10.0, 0.1, fov_v, o).captures.size() == 7);
    CHECK(plan_captures(10.0, 0.025, fov_v, o).captures.size() == 2);
  }
  SUBCASE("sweep beyond one revolution is capped") {
    const auto p = plan_captures(10.0, 0.35, fov_v, {1024, deg2rad(115.0), deg2rad(2.0)});
    CHECK(p.covered_azimuth == doctest::Approx(2 * kPi));
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(plan_captures(10.0, 0.0, fov_v), RangeError);
    CHECK_THROWS_AS(plan_captures(0.0, 0.1, fov_v), RangeError);
    CHECK_THROWS_AS(plan_captures(10.0, 0.1, deg2rad(120.0)), RangeError);
  }
}

TEST_CASE("captures tile the sweep contiguously and stay within the cap") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dt(0.001, 0.1);
  std::uniform_real_distribution<double> start(0.0, 20.0);
  for (int k = 0; k < 200; ++k) {
    const CaptureOptions o{512, deg2rad(100.0), deg2rad(2.0)};
    const double s = start(rng);
    const auto p = plan_captures(10.0, dt(rng), deg2rad(45.0), o, s);
    double sum = 0.0;
    double edge = s;
    for (const auto& c : p.captures) {
      REQUIRE(std::abs(c.azimuth_begin - edge) <= 1e-9);
      REQUIRE(c.intrinsics.fov <= o.max_capture_fov + 1e-12);
      sum += c.azimuth_span;
      edge += c.azimuth_span;
    }
    REQUIRE(std::abs(sum - p.covered_azimuth) <= 1e-9);
  }
}

TEST_CASE("pixel direction through the principal point is the optical axis") {
  const auto intr = make_intrinsics(256, deg2rad(90.0));
  CHECK((pixel_direction(intr, 128, 128) - Vec3::UnitX()).norm() < 1e-15);
  // Right of centre looks towards +y, below centre towards -z.
  CHECK(pixel_direction(intr, 200, 128).y() > 0);
  CHECK(pixel_direction(intr, 128, 200).z() < 0);
}

TEST_CASE("plane at 10 m: centre depth and incidence") {
  const Scene s = testing::plane_scene(10.0);
  const auto intr = make_intrinsics(256, deg2rad(90.0));
  const auto fb = rasterize(s, Pose::Identity(), 0.0, intr, 50.0);
  const auto c = fb.index(128, 128);
  CHECK(fb.depth[c] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(fb.incidence[c] == doctest::Approx(0.0));
  CHECK(fb.instance[c] == 1);

  // Depth is Euclidean, not planar: off-axis pixels see 10 / cos(angle).
  const Vec3 d = pixel_direction(intr, 20, 70);
  const auto i = fb.index(20, 70);
  CHECK(fb.depth[i] == doctest::Approx(10.0 / d.x()).epsilon(1e-12));
  CHECK(fb.incidence[i] == doctest::Approx(std::acos(d.x())).epsilon(1e-9));
}

TEST_CASE("plane tilted by 60 degrees") {
  std::vector<SceneObject> objs;
  objs.push_back(testing::make_object("wall", primitives::quad(200, 200),
                                      make_pose({10, 0, 0}, {0, 0, deg2rad(60.0)}), 1));
  Scene s = Scene::from_objects(std::move(objs));
  s.build_bvh();
  const auto fb = rasterize(s, Pose::Identity(), 0.0, make_intrinsics(256, deg2rad(60.0)), 50.0);
  const auto c = fb.index(128, 128);
  CHECK(rad2deg(fb.incidence[c]) == doctest::Approx(60.0).epsilon(1e-9));
  CHECK(fb.depth[c] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("incidence does not depend on normal orientation") {
  const Pose pose = make_pose({8, 1, 0.5}, {0.2, 0.1, 0.4});
  Mesh m = primitives::quad(30, 30);
  Mesh flipped = m;
  for (auto& f : flipped.faces) std::swap(f[1], f[2]);
  auto build = [&](Mesh mesh) {
    std::vector<SceneObject> objs;
    objs.push_back(testing::make_object("q", std::move(mesh), pose, 1));
    Scene s = Scene::from_objects(std::move(objs));
    s.build_bvh();
    return s;
  };
  const auto intr = make_intrinsics(128, deg2rad(80.0));
  const auto a = rasterize(build(m), Pose::Identity(), 0.1, intr, 50.0);
  const auto b = rasterize(build(flipped), Pose::Identity(), 0.1, intr, 50.0);
  // Winding changes the edge-function order, so depth may move in the last bits.
  CHECK(a.incidence == b.incidence);
  for (std::size_t i = 0; i < a.depth.size(); ++i) {
    REQUIRE(a.is_hit(i) == b.is_hit(i));
    if (a.is_hit(i)) REQUIRE(std::abs(a.depth[i] - b.depth[i]) <= 1e-12 * a.depth[i]);
  }
}

TEST_CASE("raster buffers match independently cast rays") {
  const Scene s = testing::random_triangle_scene(2000, 21);
  const Pose pose = make_pose({0.5, -0.3, 0.2}, {0.05, -0.1, 0.3});
  const double yaw = 1.1;
  const auto intr = make_intrinsics(256, deg2rad(100.0));
  const auto fb = rasterize(s, pose, yaw, intr, 50.0);

  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> px(0, 255);
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  for (int k = 0; k < 1000; ++k) {
    const int x = px(rng);
    const int y = px(rng);
    // Capture frame: x forward, y left in image-right, z up; yaw about z.
    const Vec3 local = Vec3(1.0, (x - intr.cu) / intr.fx, -(y - intr.cv) / intr.fy).normalized();
    const Vec3 sensor(cy * local.x() - sy * local.y(), sy * local.x() + cy * local.y(), local.z());
    const Ray ray{pose.translation(), pose.linear() * sensor};
    const auto ref = s.intersect_brute_force(ray);
    const auto idx = fb.index(x, y);
    REQUIRE(ref.has_value() == fb.is_hit(idx));
    if (ref) {
      REQUIRE(std::abs(fb.depth[idx] - ref->distance) <= 1e-6);
      REQUIRE(fb.instance[idx] == ref->instance_id);
      REQUIRE(fb.material[idx] == ref->material_index);
      const double inc = std::acos(std::min(1.0, std::abs(ref->normal.dot(ray.direction))));
      REQUIRE(std::abs(fb.incidence[idx] - inc) <= 1e-6);
    }
  }
}

TEST_CASE("24-bit reads stay within a quantum of the float buffers") {
  const Scene s = testing::plane_scene(10.0);
  const auto fb = rasterize(s, Pose::Identity(), 0.0, make_intrinsics(128, deg2rad(90.0)), 50.0);
  for (std::size_t i = 0; i < fb.depth.size(); ++i) {
    REQUIRE(std::abs(fb.read_depth(i, true) - fb.depth[i]) <= 50.0 / 16777216.0);
    REQUIRE(std::abs(fb.read_incidence(i, true) - fb.incidence[i]) <= (kPi / 2) / 16777216.0);
    REQUIRE(fb.read_material(i, true) == fb.material[i]);
  }
}

TEST_CASE("hits beyond the encode range keep full precision") {
  const Scene s = testing::plane_scene(60.0, 400.0);
  const auto fb = rasterize(s, Pose::Identity(), 0.0, make_intrinsics(64, deg2rad(60.0)), 50.0);
  const auto c = fb.index(32, 32);
  CHECK(fb.read_depth(c, true) == 60.0);
}

TEST_CASE("empty scene renders all misses") {
  const Scene s = Scene::from_objects({});
  const auto fb = rasterize(s, Pose::Identity(), 0.0, make_intrinsics(64, 1.0), 50.0);
  for (std::size_t i = 0; i < fb.depth.size(); ++i) {
    REQUIRE_FALSE(fb.is_hit(i));
    REQUIRE(std::isinf(fb.depth[i]));
  }
}

TEST_CASE("unbuilt BVH is an error") {
  std::vector<SceneObject> objs;
  objs.push_back(testing::make_object("b", primitives::box({1, 1, 1}), make_pose({5, 0, 0}, {0, 0, 0}), 1));
  const Scene s = Scene::from_objects(std::move(objs));
  CHECK_THROWS_AS(rasterize(s, Pose::Identity(), 0.0, make_intrinsics(64, 1.0), 50.0), ValidationError);
}

TEST_CASE("debug images are written") {
  const auto dir = testing::scratch_dir("debug_images");
  const Scene s = testing::plane_scene(10.0);
  const auto fb = rasterize(s, Pose::Identity(), 0.0, make_intrinsics(64, 1.0), 50.0);
  write_debug_images(fb, dir, "cap0");
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    CHECK(std::filesystem::file_size(e.path()) > 64 * 64);
    ++n;
  }
  CHECK(n == 4);
}
