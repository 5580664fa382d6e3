#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floorgen/exec.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/preprocess.hpp"

namespace floorgen {

using Polyline2D = std::vector<Vec2>;

// 2D drawing polylines per class, in the normalized frame.
struct DrawingSet {
  std::vector<Polyline2D> walls;
  std::vector<Polyline2D> doors;
  std::vector<Polyline2D> stairs;

  // Enforces the polyline invariants (>= 2 vertices, no consecutive
  // duplicates); throws InvalidSpec on violation.
  void validate() const;
};

struct AnnotationParams {
  double offset = 0.10;      // max point-to-polyline distance
  double door_z_max = 2.2;   // doors only labeled up to this height above the floor
  // Per-class overrides; unset means use `offset`.
  std::optional<double> wall_offset;
  std::optional<double> door_offset;
  std::optional<double> stair_offset;
};

// Labels every point by priority: floor slab, ceiling slab, door (with height
// gate), stair, wall, clutter. Pure per-point classification; parallel output
// equals serial output bitwise.
LabeledPointCloud annotate_from_drawing(const LabeledPointCloud& cloud,
                                        const DrawingSet& drawing,
                                        const FloorCeilingLevels& levels,
                                        const AnnotationParams& params,
                                        Exec exec = Exec::Parallel);

// Attaches labels from a file with one 0-based class index per line
// (the ingestion contract for an external semantic segmentation stage).
LabeledPointCloud load_labels(const LabeledPointCloud& cloud, const std::string& path);

void save_labels(const LabeledPointCloud& cloud, const std::string& path);

DrawingSet load_drawing(const std::string& path);
void save_drawing(const DrawingSet& drawing, const std::string& path);

}  // namespace floorgen
