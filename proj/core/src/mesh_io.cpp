// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/error.hpp"
#include "lidarsim/mesh.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lidarsim {

namespace {

struct ObjIndex {
  long vertex = 0;
  long normal = 0;  // 0 when absent
};

long resolve_index(long raw, std::size_t count, const std::filesystem::path& path, int line) {
  // OBJ indices are 1-based; negative values count from the end.
  const long resolved = raw > 0 ? raw - 1 : static_cast<long>(count) + raw;
  if (raw == 0 || resolved < 0 || resolved >= static_cast<long>(count)) {
    throw ParseError(fmt::format("{}:{}: index {} out of range", path.string(), line, raw));
  }
  return resolved;
}

ObjIndex parse_face_token(const std::string& token, const std::filesystem::path& path, int line) {
  ObjIndex idx;
  const auto first_slash = token.find('/');
  auto parse_long = [&](std::string_view text) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError(fmt::format("{}:{}: bad face token '{}'", path.string(), line, token));
    }
    return value;
  };
  idx.vertex = parse_long(std::string_view(token).substr(0, first_slash));
  if (first_slash != std::string::npos) {
    const auto second_slash = token.find('/', first_slash + 1);
    if (second_slash != std::string::npos && second_slash + 1 < token.size()) {
      idx.normal = parse_long(std::string_view(token).substr(second_slash + 1));
    }
  }
  return idx;
}

struct GroupBuilder {
  ObjGroup group;
  std::vector<std::pair<long, long>> corners;  // (vertex, normal) per corner
  std::vector<Face> faces;
  bool all_normals = true;
};

ObjGroup finish_group(GroupBuilder& builder, const std::vector<Vec3>& positions,
                      const std::vector<Vec3>& normals) {
  // Re-index so each group owns a compact vertex list. A vertex used with two
  // different normals is duplicated.
  ObjGroup out = std::move(builder.group);
  std::map<std::pair<long, long>, std::uint32_t> remap;
  const bool smooth = builder.all_normals && !builder.corners.empty();
  for (std::size_t f = 0; f < builder.faces.size(); ++f) {
    Face face{};
    for (int k = 0; k < 3; ++k) {
      auto key = builder.corners[builder.faces[f][k]];
      if (!smooth) {
        key.second = 0;
      }
      auto [it, inserted] = remap.try_emplace(key, static_cast<std::uint32_t>(out.mesh.vertices.size()));
      if (inserted) {
        out.mesh.vertices.push_back(positions[key.first]);
        if (smooth) {
          out.mesh.vertex_normals.push_back(normals[key.second - 1].normalized());
        }
      }
      face[k] = it->second;
    }
    out.mesh.faces.push_back(face);
  }
  return out;
}

}  // namespace

std::vector<ObjGroup> read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open mesh file '{}'", path.string()));
  }

  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<ObjGroup> groups;
  GroupBuilder current;
  current.group.name = path.stem().string();

  auto flush = [&] {
    if (!current.faces.empty()) {
      groups.push_back(finish_group(current, positions, normals));
    }
  };

  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream line(text);
    std::string tag;
    if (!(line >> tag) || tag.front() == '#') {
      continue;
    }
    if (tag == "v" || tag == "vn") {
      Vec3 p;
      if (!(line >> p.x() >> p.y() >> p.z())) {
        throw ParseError(fmt::format("{}:{}: expected three coordinates", path.string(), line_no));
      }
      (tag == "v" ? positions : normals).push_back(p);
    } else if (tag == "f") {
      std::vector<std::size_t> polygon;
      std::string token;
      while (line >> token) {
        const ObjIndex raw = parse_face_token(token, path, line_no);
        const long v = resolve_index(raw.vertex, positions.size(), path, line_no);
        long n = 0;
        if (raw.normal != 0) {
          n = resolve_index(raw.normal, normals.size(), path, line_no) + 1;
        } else {
          current.all_normals = false;
        }
        polygon.push_back(current.corners.size());
        current.corners.emplace_back(v, n);
      }
      if (polygon.size() < 3) {
        throw ParseError(fmt::format("{}:{}: face with fewer than 3 vertices", path.string(), line_no));
      }
      for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
        current.faces.push_back({static_cast<std::uint32_t>(polygon[0]),
                                 static_cast<std::uint32_t>(polygon[k]),
                                 static_cast<std::uint32_t>(polygon[k + 1])});
      }
    } else if (tag == "o" || tag == "g") {
      std::string name;
      std::getline(line >> std::ws, name);
      flush();
      const std::string material = current.group.material;
      current = GroupBuilder{};
      current.group.name = name.empty() ? fmt::format("group{}", groups.size()) : name;
      current.group.material = material;
    } else if (tag == "usemtl") {
      line >> current.group.material;
    }
    // vt, s, mtllib and friends are ignored.
  }
  flush();
  return groups;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write mesh file '{}'", path.string()));
  }
  for (const auto& p : mesh.vertices) {
    out << fmt::format("v {:.9f} {:.9f} {:.9f}\n", p.x(), p.y(), p.z());
  }
  for (const auto& n : mesh.vertex_normals) {
    out << fmt::format("vn {:.9f} {:.9f} {:.9f}\n", n.x(), n.y(), n.z());
  }
  for (const auto& f : mesh.faces) {
    if (mesh.has_vertex_normals()) {
      out << fmt::format("f {0}//{0} {1}//{1} {2}//{2}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    } else {
      out << fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    }
  }
}

namespace primitives {

Mesh box(const Vec3& size) {
  const Vec3 h = 0.5 * size;
  Mesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // Outward-facing, counter-clockwise.
  m.faces = {{0, 2, 3}, {0, 3, 1},   // -z
             {4, 5, 7}, {4, 7, 6},   // +z
             {0, 1, 5}, {0, 5, 4},   // -y
             {2, 6, 7}, {2, 7, 3},   // +y
             {0, 4, 6}, {0, 6, 2},   // -x
             {1, 3, 7}, {1, 7, 5}};  // +x
  return m;
}

Mesh quad(double width, double height) {
  const double hw = 0.5 * width;
  const double hh = 0.5 * height;
  Mesh m;
  m.vertices = {{0.0, -hw, -hh}, {0.0, hw, -hh}, {0.0, hw, hh}, {0.0, -hw, hh}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

Mesh uv_sphere(double radius, int stacks, int slices) {
  Mesh m;
  // Poles on z.
  m.vertices.emplace_back(0.0, 0.0, radius);
  m.vertex_normals.emplace_back(0.0, 0.0, 1.0);
  for (int s = 1; s < stacks; ++s) {
    const double polar = kPi * s / stacks;
    for (int k = 0; k < slices; ++k) {
      const double az = 2.0 * kPi * k / slices;
      const Vec3 n(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar));
      m.vertices.push_back(radius * n);
      m.vertex_normals.push_back(n);
    }
  }
  m.vertices.emplace_back(0.0, 0.0, -radius);
  m.vertex_normals.emplace_back(0.0, 0.0, -1.0);

  const auto bottom = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [slices](int s, int k) {
    return static_cast<std::uint32_t>(1 + (s - 1) * slices + (k % slices));
  };
  for (int k = 0; k < slices; ++k) {
    m.faces.push_back({0, ring(1, k), ring(1, k + 1)});
  }
  for (int s = 1; s + 1 < stacks; ++s) {
    for (int k = 0; k < slices; ++k) {
      m.faces.push_back({ring(s, k), ring(s + 1, k), ring(s + 1, k + 1)});
      m.faces.push_back({ring(s, k), ring(s + 1, k + 1), ring(s, k + 1)});
    }
  }
  for (int k = 0; k < slices; ++k) {
    m.faces.push_back({ring(stacks - 1, k), bottom, ring(stacks - 1, k + 1)});
  }
  return m;
}

}  // namespace primitives

}  // namespace lidarsim
