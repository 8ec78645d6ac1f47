// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lidarsim/physics.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lidarsim {

enum class CloudFormat { ply, pcd, csv };

/// Accepts "ply", "pcd" or "csv". Throws ParseError otherwise.
CloudFormat parse_cloud_format(std::string_view name);
std::string_view extension(CloudFormat format);

/// ASCII serialization of x y z intensity ring instance_id material_index
/// timestamp. Meters use 6 decimals, intensity 4, timestamps 9, so output is
/// byte-stable for identical inputs.
std::string format_cloud(std::span<const LidarPoint> points, CloudFormat format);
void write_cloud(std::span<const LidarPoint> points, CloudFormat format, const std::filesystem::path& path);

/// Reads files produced by `write_cloud`. Only the serialized fields are
/// populated; `range` is recomputed from x, y, z.
std::vector<LidarPoint> read_cloud(const std::filesystem::path& path, CloudFormat format);

}  // namespace lidarsim
