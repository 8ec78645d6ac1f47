// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/error.hpp"
#include "lidarsim/scene.hpp"
#include "unit/support.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

using namespace lidarsim;
using testing::make_object;

TEST_CASE("cube scene loads with its instance table") {
  const Scene s = load_scene(testing::data_path("scenes/cube.json"));
  CHECK(s.triangles().size() == 12);
  REQUIRE(s.instance_table().size() == 1);
  CHECK(s.instance_table().at(7) == InstanceInfo{"cube", "prop"});
  CHECK(s.objects().at(0).material_index == 3);
}

TEST_CASE("duplicate instance ids are rejected") {
  std::vector<SceneObject> objs;
  objs.push_back(make_object("a", primitives::box({1, 1, 1}), Pose::Identity(), 4));
  objs.push_back(make_object("b", primitives::box({1, 1, 1}), make_pose({3, 0, 0}, {0, 0, 0}), 4));
  CHECK_THROWS_AS(Scene::from_objects(std::move(objs)), ValidationError);
}

TEST_CASE("material index above 255 is rejected") {
  std::vector<SceneObject> objs;
  objs.push_back(make_object("a", primitives::box({1, 1, 1}), Pose::Identity(), 1, 256));
  CHECK_THROWS_AS(Scene::from_objects(std::move(objs)), ValidationError);
}

TEST_CASE("instance id beyond 24 bits is rejected") {
  std::vector<SceneObject> objs;
  objs.push_back(make_object("a", primitives::box({1, 1, 1}), Pose::Identity(), kMaxInstanceId + 1));
  CHECK_THROWS_AS(Scene::from_objects(std::move(objs)), ValidationError);
}

TEST_CASE("validation scene: nine instances, nine materials") {
  const Scene s = load_scene(testing::data_path("scenes/validation.json"));
  CHECK(s.instance_table().size() == 9);
  std::set<int> materials;
  for (const auto& o : s.objects()) materials.insert(o.material_index);
  CHECK(materials.size() == 9);
}

TEST_CASE("missing instance ids are assigned without collisions") {
  std::vector<SceneObject> objs;
  objs.push_back(make_object("a", primitives::box({1, 1, 1}), Pose::Identity(), 1));
  objs.push_back(make_object("b", primitives::box({1, 1, 1}), make_pose({3, 0, 0}, {0, 0, 0})));
  objs.push_back(make_object("c", primitives::box({1, 1, 1}), make_pose({6, 0, 0}, {0, 0, 0}), 3));
  objs.push_back(make_object("d", primitives::box({1, 1, 1}), make_pose({9, 0, 0}, {0, 0, 0})));
  const Scene s = Scene::from_objects(std::move(objs));
  std::set<std::uint32_t> ids;
  for (const auto& o : s.objects()) {
    CHECK(o.instance_id != kNoInstance);
    ids.insert(o.instance_id);
  }
  CHECK(ids.size() == 4);
}

TEST_CASE("degenerate triangles are skipped with a warning") {
  Mesh m = primitives::quad(1, 1);
  m.vertices.push_back({0, 0, 0});
  m.vertices.push_back({0, 1, 0});
  m.vertices.push_back({0, 2, 0});  // collinear
  const auto n = static_cast<std::uint32_t>(m.vertices.size());
  m.faces.push_back({n - 3, n - 2, n - 1});
  std::vector<SceneObject> objs;
  objs.push_back(make_object("q", std::move(m), Pose::Identity(), 2));
  const Scene s = Scene::from_objects(std::move(objs));
  CHECK(s.triangles().size() == 2);
  CHECK_FALSE(s.warnings().empty());
}

TEST_CASE("BVH root box equals the mesh bounds") {
  Scene s = load_scene(testing::data_path("scenes/cube.json"));
  s.build_bvh();
  Aabb expected;
  for (const auto& t : s.triangles())
    for (const auto& v : t.v) expected.extend(v);
  CHECK((s.bvh().root_bounds().lo - expected.lo).norm() == 0.0);
  CHECK((s.bvh().root_bounds().hi - expected.hi).norm() == 0.0);
}

TEST_CASE("empty scene cannot build a BVH") {
  Scene s = Scene::from_objects({});
  CHECK_THROWS_AS(s.build_bvh(), ValidationError);
  CHECK_FALSE(s.intersect(Ray{}).has_value());
}

TEST_CASE("rigid transforms preserve triangle areas") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Mesh m = primitives::uv_sphere(1.3, 6, 12);
  std::vector<SceneObject> ref;
  ref.push_back(make_object("s", m, Pose::Identity(), 1));
  const Scene base = Scene::from_objects(std::move(ref));
  for (int k = 0; k < 20; ++k) {
    std::vector<SceneObject> objs;
    objs.push_back(make_object("s", m, make_pose({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}), 1));
    const Scene moved = Scene::from_objects(std::move(objs));
    REQUIRE(moved.triangles().size() == base.triangles().size());
    for (std::size_t i = 0; i < base.triangles().size(); ++i) {
      const double a = base.triangles()[i].area();
      REQUIRE(std::abs(moved.triangles()[i].area() - a) <= 1e-9 * a);
    }
  }
}

TEST_CASE("every triangle normal is unit length") {
  const Scene s = load_scene(testing::data_path("scenes/room.json"));
  for (const auto& t : s.triangles()) {
    REQUIRE(std::abs(t.normal.norm() - 1.0) <= 1e-6);
  }
}

TEST_CASE("semantic lookup") {
  const Scene s = load_scene(testing::data_path("scenes/cube.json"));
  CHECK(s.semantic_lookup(7) == InstanceInfo{"cube", "prop"});
  CHECK(s.semantic_lookup(0) == InstanceInfo{"none", "none"});
  CHECK_THROWS_AS(s.semantic_lookup(8), RangeError);
}

TEST_CASE("intersect resolves semantics") {
  Scene s = load_scene(testing::data_path("scenes/cube.json"));
  s.build_bvh();
  const Vec3 c = s.bounds().centroid();
  const Vec3 origin = c + Vec3(10, 0, 0);
  const auto hit = s.intersect(Ray{origin, -Vec3::UnitX()});
  REQUIRE(hit);
  CHECK(hit->instance_id == 7);
  CHECK(hit->material_index == 3);
  CHECK(hit->distance == doctest::Approx(origin.x() - s.bounds().hi.x()));
}

TEST_CASE("scene file errors") {
  const auto dir = testing::scratch_dir("scene_errors");
  CHECK_THROWS_AS(load_scene(dir / "nope.json"), IoError);
  {
    std::ofstream f(dir / "bad.json");
    f << "{ \"objects\": [ { \"name\": \"x\" } ] }";
  }
  CHECK_THROWS_AS(load_scene(dir / "bad.json"), ParseError);
  {
    std::ofstream f(dir / "trunc.json");
    f << "{ \"objects\": [ ";
  }
  CHECK_THROWS_AS(load_scene(dir / "trunc.json"), ParseError);
}

TEST_CASE("OBJ scene format maps groups to objects") {
  const auto dir = testing::scratch_dir("obj_scene");
  {
    std::ofstream f(dir / "two.obj");
    f << "o left\nusemtl 4\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"
         "o right\nusemtl 6\nv 5 0 0\nv 6 0 0\nv 5 1 0\nf 4 5 6\n";
  }
  const Scene s = load_scene(dir / "two.obj", SceneFormat::wavefront_mesh);
  REQUIRE(s.objects().size() == 2);
  CHECK(s.objects()[0].material_index == 4);
  CHECK(s.objects()[1].material_index == 6);
  CHECK(s.instance_table().size() == 2);
}
