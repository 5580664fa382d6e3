#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floorgen/geometry.hpp"

namespace floorgen {

enum class SemanticClass : std::uint8_t {
  Ceiling = 0,
  Floor = 1,
  Wall = 2,
  Door = 3,
  Stair = 4,
  Clutter = 5,
};

constexpr int kNumSemanticClasses = 6;

const char* to_string(SemanticClass c);

using Color = std::array<std::uint8_t, 3>;

// Positions plus optional per-point colors and semantic labels. The universal
// currency between pipeline stages; immutable by convention once built.
struct LabeledPointCloud {
  std::vector<Vec3> positions;
  std::optional<std::vector<Color>> colors;
  std::optional<std::vector<SemanticClass>> labels;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_colors() const { return colors.has_value(); }
  bool has_labels() const { return labels.has_value(); }

  // Keeps exactly the points whose indices are listed, in the given order.
  LabeledPointCloud select(const std::vector<std::size_t>& indices) const;
};

enum class CloudFormat { PlyAscii, PlyBinaryLE, Xyz };

// Format inferred from extension: .ply (header decides ascii/binary), .xyz.
LabeledPointCloud load_point_cloud(const std::string& path);
LabeledPointCloud load_point_cloud(const std::string& path, CloudFormat format);

void save_point_cloud(const LabeledPointCloud& cloud, const std::string& path,
                      CloudFormat format);

}  // namespace floorgen
