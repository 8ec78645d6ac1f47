// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/bvh.hpp"
#include "lidarsim/geometry.hpp"
#include "lidarsim/mesh.hpp"
#include "unit/support.hpp"

#include <doctest.h>

#include "lidarsim/error.hpp"

#include <fstream>
#include <random>

using namespace lidarsim;

TEST_CASE("spherical direction axes") {
  CHECK((spherical_direction(0, 0) - Vec3::UnitX()).norm() < 1e-15);
  CHECK((spherical_direction(kPi / 2, 0) - Vec3::UnitY()).norm() < 1e-15);
  CHECK((spherical_direction(0, kPi / 2) - Vec3::UnitZ()).norm() < 1e-15);
}

TEST_CASE("make_pose applies yaw about z") {
  const Pose p = make_pose({1, 2, 3}, {0, 0, kPi / 2});
  const Vec3 q = p * Vec3(1, 0, 0);
  CHECK(q.x() == doctest::Approx(1.0));
  CHECK(q.y() == doctest::Approx(3.0));
  CHECK(q.z() == doctest::Approx(3.0));
}

TEST_CASE("triangle test: interior, edge sharing, miss, behind") {
  const Vec3 a(5, -1, -1), b(5, 1, -1), c(5, 0, 1);
  const PreparedRay ray(Ray{Vec3::Zero(), Vec3::UnitX()});
  auto hit = intersect_triangle(ray, a, b, c, kInfinity);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(5.0));
  double sum = hit->barycentric[0] + hit->barycentric[1] + hit->barycentric[2];
  CHECK(sum == doctest::Approx(1.0));

  // Two-sided.
  CHECK(intersect_triangle(ray, a, c, b, kInfinity));
  // Behind the origin.
  const PreparedRay back(Ray{Vec3::Zero(), -Vec3::UnitX()});
  CHECK_FALSE(intersect_triangle(back, a, b, c, kInfinity));
  // t_max excludes.
  CHECK_FALSE(intersect_triangle(ray, a, b, c, 4.0));
}

TEST_CASE("watertight: rays through a shared edge hit at least one of two triangles") {
  // Quad split along the diagonal y == z.
  const Vec3 p0(3, -1, -1), p1(3, 1, -1), p2(3, 1, 1), p3(3, -1, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int k = 0; k < 2000; ++k) {
    const double s = u(rng);
    const Vec3 target(3, s, s);
    const PreparedRay ray(Ray{Vec3::Zero(), target.normalized()});
    const bool h = intersect_triangle(ray, p0, p1, p2, kInfinity).has_value() ||
                   intersect_triangle(ray, p0, p2, p3, kInfinity).has_value();
    REQUIRE(h);
  }
}

TEST_CASE("box slab test") {
  Aabb box;
  box.extend(Vec3(1, -1, -1));
  box.extend(Vec3(2, 1, 1));
  double t = 0;
  CHECK(intersect_box(PreparedRay(Ray{Vec3::Zero(), Vec3::UnitX()}), box, kInfinity, t));
  CHECK(t == doctest::Approx(1.0));
  CHECK_FALSE(intersect_box(PreparedRay(Ray{Vec3::Zero(), Vec3::UnitY()}), box, kInfinity, t));
  CHECK_FALSE(intersect_box(PreparedRay(Ray{Vec3::Zero(), Vec3::UnitX()}), box, 0.5, t));
}

TEST_CASE("primitives") {
  const Mesh b = primitives::box({1, 2, 3});
  CHECK(b.triangle_count() == 12);
  const Mesh q = primitives::quad(2, 4);
  CHECK(q.triangle_count() == 2);
  const Mesh s = primitives::uv_sphere(2.0, 8, 16);
  REQUIRE(s.has_vertex_normals());
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    CHECK(s.vertices[i].norm() == doctest::Approx(2.0));
    CHECK((s.vertex_normals[i] - s.vertices[i] / 2.0).norm() < 1e-12);
  }
}

TEST_CASE("OBJ round trip") {
  const auto dir = testing::scratch_dir("obj");
  const Mesh b = primitives::box({1, 2, 3});
  write_obj(b, dir / "box.obj");
  const auto groups = read_obj(dir / "box.obj");
  REQUIRE(groups.size() == 1);
  const Mesh& r = groups[0].mesh;
  REQUIRE(r.faces.size() == b.faces.size());
  for (std::size_t f = 0; f < b.faces.size(); ++f) {
    for (int c = 0; c < 3; ++c) {
      REQUIRE((r.vertices[r.faces[f][c]] - b.vertices[b.faces[f][c]]).norm() == 0.0);
    }
  }
}

TEST_CASE("OBJ quads are fan-triangulated") {
  const auto groups = read_obj(testing::data_path("meshes/cube.obj"));
  std::size_t tris = 0;
  for (const auto& g : groups) tris += g.mesh.triangle_count();
  CHECK(tris == 12);
}

TEST_CASE("OBJ parse errors") {
  const auto dir = testing::scratch_dir("obj_bad");
  {
    std::ofstream f(dir / "bad.obj");
    f << "v 0 0 0\nv 1 0 0\nf 1 2 9\n";
  }
  CHECK_THROWS_AS(read_obj(dir / "bad.obj"), ParseError);
  CHECK_THROWS_AS(read_obj(dir / "missing.obj"), IoError);
}

TEST_CASE("BVH nodes bound their contents and every triangle sits in exactly one leaf") {
  const auto scene = testing::random_triangle_scene(3000, 11);
  const auto& bvh = scene.bvh();
  const auto& nodes = bvh.nodes();
  std::vector<int> seen(scene.triangles().size(), 0);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& node = nodes[n];
    if (node.is_leaf()) {
      for (std::uint32_t k = 0; k < node.count; ++k) {
        const auto tri = bvh.primitive_indices()[node.offset + k];
        ++seen[tri];
        CHECK(node.bounds.contains(scene.triangles()[tri].bounds()));
      }
    } else {
      CHECK(node.bounds.contains(nodes[n + 1].bounds));
      CHECK(node.bounds.contains(nodes[node.offset].bounds));
    }
  }
  for (int s : seen) REQUIRE(s == 1);
}

TEST_CASE("BVH nearest hit equals brute force on 10k triangles") {
  const auto scene = testing::random_triangle_scene(10000, 3);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-12.0, 12.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  int hits = 0;
  for (int k = 0; k < 1000; ++k) {
    Ray r{Vec3(pos(rng), pos(rng), pos(rng)), Vec3(dir(rng), dir(rng), dir(rng)).normalized()};
    const auto a = scene.bvh().nearest_hit(r, scene.triangles());
    const auto b = brute_force_nearest_hit(r, scene.triangles());
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      ++hits;
      // Same triangle, or a tie in distance.
      const bool same = a->triangle == b->triangle || std::abs(a->t - b->t) <= 1e-9 * b->t;
      REQUIRE(same);
    }
  }
  CHECK(hits > 100);
}
