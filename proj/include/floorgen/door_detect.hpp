#pragma once

#include <cstddef>
#include <vector>

#include "floorgen/point_cloud.hpp"
#include "floorgen/preprocess.hpp"
#include "floorgen/wall_seg.hpp"

namespace floorgen {

// Occupancy grid over a wall's face: u runs along the wall line from the
// grid origin, v is height above the floor. Off-plane points (beyond
// 3 * inlier_rms + 2 cm) are excluded so open door leaves do not fill their
// own opening.
struct WallGrid {
  int wall_id = -1;
  Vec2 u_dir{1, 0};
  Vec2 origin{0, 0};  // plan position of u = 0
  double cell = 0.05;
  std::size_t u_bins = 0;
  std::size_t v_bins = 0;
  std::vector<std::uint32_t> occupancy;  // u-major: [u * v_bins + v]

  std::uint32_t at(std::size_t u, std::size_t v) const { return occupancy[u * v_bins + v]; }
};

struct OpeningCandidate {
  double u_lo = 0.0;  // grid-frame u, meters
  double u_hi = 0.0;
  double height = 0.0;  // clear height above the floor
  bool at_boundary = false;
};

struct DoorOpening {
  int wall_id = -1;
  double u_lo = 0.0;
  double u_hi = 0.0;
  double width = 0.0;
  double height = 0.0;
  Vec2 center{0, 0};  // plan-space midpoint of the opening
};

struct DoorBounds {
  double width_min = 0.6;
  double width_max = 1.6;
  double height_min = 1.8;
  double height_max = 2.4;
  double aspect_min = 1.2;  // height / width
  double aspect_max = 3.5;
};

WallGrid build_wall_grid(const WallInstance& wall, int wall_id, const LabeledPointCloud& cloud,
                         const FloorCeilingLevels& levels, double cell);

// Maximal runs of grid columns that are empty from the floor up to at least
// min_clear_height. Runs touching the wall's u-boundary are usually wall
// ends rather than doors and are dropped unless include_boundary is set.
std::vector<OpeningCandidate> find_empty_openings(const WallGrid& grid, double min_clear_height,
                                                  bool include_boundary = false);

std::vector<DoorOpening> parametric_filter_doors(const std::vector<OpeningCandidate>& candidates,
                                                 const WallGrid& grid, const DoorBounds& bounds);

// Full per-wall pass: grid, openings, parametric filter. Walls are processed
// independently; output order follows wall id.
std::vector<DoorOpening> detect_doors(const std::vector<WallInstance>& walls,
                                      const LabeledPointCloud& cloud,
                                      const FloorCeilingLevels& levels, double cell,
                                      double min_clear_height, const DoorBounds& bounds);

}  // namespace floorgen
