// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/cloud_io.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lidarsim {

namespace {

constexpr const char* kFieldNames[] = {"x", "y", "z", "intensity", "ring", "instance_id", "material_index",
                                       "timestamp"};

void append_record(std::string& out, const LidarPoint& p, char sep) {
  fmt::format_to(std::back_inserter(out), "{:.6f}{}{:.6f}{}{:.6f}{}{:.4f}{}{}{}{}{}{}{}{:.9f}\n", p.x, sep, p.y,
                 sep, p.z, sep, p.intensity, sep, p.ring, sep, p.instance_id, sep,
                 static_cast<unsigned>(p.material_index), sep, p.timestamp);
}

LidarPoint parse_record(const std::string& line, char sep, const std::filesystem::path& path, std::size_t line_no) {
  std::string text = line;
  if (sep != ' ') {
    std::replace(text.begin(), text.end(), sep, ' ');
  }
  std::istringstream in(text);
  LidarPoint p;
  unsigned material = 0;
  if (!(in >> p.x >> p.y >> p.z >> p.intensity >> p.ring >> p.instance_id >> material >> p.timestamp) ||
      material > 255) {
    throw ParseError(fmt::format("{}:{}: malformed point record", path.string(), line_no));
  }
  p.material_index = static_cast<std::uint8_t>(material);
  p.column = 0;
  p.range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  return p;
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "ply") return CloudFormat::ply;
  if (name == "pcd") return CloudFormat::pcd;
  if (name == "csv") return CloudFormat::csv;
  throw ParseError(fmt::format("unknown point cloud format '{}' (expected ply, pcd or csv)", name));
}

std::string_view extension(CloudFormat format) {
  switch (format) {
    case CloudFormat::ply:
      return "ply";
    case CloudFormat::pcd:
      return "pcd";
    case CloudFormat::csv:
      return "csv";
  }
  return "";
}

std::string format_cloud(std::span<const LidarPoint> points, CloudFormat format) {
  std::string out;
  out.reserve(96 * (points.size() + 4));
  char sep = ' ';
  switch (format) {
    case CloudFormat::ply:
      fmt::format_to(std::back_inserter(out),
                     "ply\n"
                     "format ascii 1.0\n"
                     "comment lidarsim point cloud, sensor frame, meters\n"
                     "element vertex {}\n"
                     "property double x\n"
                     "property double y\n"
                     "property double z\n"
                     "property float intensity\n"
                     "property ushort ring\n"
                     "property uint instance_id\n"
                     "property uchar material_index\n"
                     "property double timestamp\n"
                     "end_header\n",
                     points.size());
      break;
    case CloudFormat::pcd:
      fmt::format_to(std::back_inserter(out),
                     "# .PCD v0.7 - Point Cloud Data file format\n"
                     "VERSION 0.7\n"
                     "FIELDS x y z intensity ring instance_id material_index timestamp\n"
                     "SIZE 8 8 8 4 2 4 1 8\n"
                     "TYPE F F F F U U U F\n"
                     "COUNT 1 1 1 1 1 1 1 1\n"
                     "WIDTH {0}\n"
                     "HEIGHT 1\n"
                     "VIEWPOINT 0 0 0 1 0 0 0\n"
                     "POINTS {0}\n"
                     "DATA ascii\n",
                     points.size());
      break;
    case CloudFormat::csv:
      sep = ',';
      out += fmt::format("{}\n", fmt::join(kFieldNames, ","));
      break;
  }
  for (const auto& p : points) {
    append_record(out, p, sep);
  }
  return out;
}

void write_cloud(std::span<const LidarPoint> points, CloudFormat format, const std::filesystem::path& path) {
  const std::string text = format_cloud(points, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write point cloud '{}'", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError(fmt::format("failed writing point cloud '{}'", path.string()));
  }
}

std::vector<LidarPoint> read_cloud(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open point cloud '{}'", path.string()));
  }
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool counted = false;
  char sep = ' ';

  auto header_until = [&](std::string_view terminator, std::string_view count_key) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.rfind(count_key, 0) == 0) {
        expected = std::stoull(line.substr(count_key.size()));
        counted = true;
      }
      if (line.rfind(terminator, 0) == 0) {
        return;
      }
    }
    throw ParseError(fmt::format("{}: missing '{}'", path.string(), terminator));
  };

  switch (format) {
    case CloudFormat::ply:
      if (!std::getline(in, line) || line != "ply") {
        throw ParseError(fmt::format("{}: not a PLY file", path.string()));
      }
      ++line_no;
      header_until("end_header", "element vertex ");
      break;
    case CloudFormat::pcd:
      header_until("DATA ascii", "POINTS ");
      break;
    case CloudFormat::csv:
      sep = ',';
      if (!std::getline(in, line)) {
        throw ParseError(fmt::format("{}: empty CSV", path.string()));
      }
      ++line_no;
      break;
  }

  std::vector<LidarPoint> points;
  if (counted) {
    points.reserve(expected);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    points.push_back(parse_record(line, sep, path, line_no));
  }
  if (counted && points.size() != expected) {
    throw ParseError(fmt::format("{}: header declares {} points, found {}", path.string(), expected, points.size()));
  }
  return points;
}

}  // namespace lidarsim
