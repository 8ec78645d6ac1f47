// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lidarsim {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh in object-local coordinates (meters).
/// `vertex_normals` is either empty or parallel to `vertices`.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> vertex_normals;

  bool has_vertex_normals() const { return !vertex_normals.empty(); }
  std::size_t triangle_count() const { return faces.size(); }
};

/// Named group of an OBJ file (`o` or `g` statement) and its `usemtl` value.
struct ObjGroup {
  std::string name;
  std::string material;
  Mesh mesh;
};

/// Reads a Wavefront OBJ file. Polygons are fan-triangulated; `vn` normals are
/// kept only when every face of a group references one per vertex.
std::vector<ObjGroup> read_obj(const std::filesystem::path& path);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

namespace primitives {

/// Axis-aligned box centred at the origin.
Mesh box(const Vec3& size);
/// Square-ish quad in the local YZ plane facing +x, centred at the origin.
Mesh quad(double width, double height);
/// Latitude/longitude sphere. Vertex normals are the exact radial directions.
/// With `stacks` even and `slices` a multiple of 4 there are vertices on all
/// six axis extremes.
Mesh uv_sphere(double radius, int stacks, int slices);

}  // namespace primitives

}  // namespace lidarsim
