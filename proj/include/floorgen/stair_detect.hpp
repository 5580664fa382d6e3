#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "floorgen/normals.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/preprocess.hpp"
#include "floorgen/spatial_index.hpp"

namespace floorgen {

// A small planar cluster that looks like a tread (horizontal) or a riser
// (vertical) between the floor and ceiling slabs.
struct StairPatch {
  std::vector<std::size_t> point_indices;
  Vec3 centroid{0, 0, 0};
  double z_lo = 0.0;
  double z_hi = 0.0;
};

struct StairStep {
  double tread_z = 0.0;       // top of the tread
  double riser_u = 0.0;       // riser position along the run direction
  double tread_depth = 0.0;
  double riser_height = 0.0;
};

struct StairRun {
  Vec2 direction{1, 0};          // unit plan direction, ascending
  std::vector<StairStep> steps;  // ascending in z and u
  std::vector<Vec2> footprint;   // plan-space quad
};

struct StairParams {
  double riser_min = 0.10;
  double riser_max = 0.22;
  double tread_min = 0.22;
  double tread_max = 0.40;
  std::size_t min_steps = 3;
  double riser_uniformity = 0.03;  // max |riser_i - median riser|
  double patch_angle_tol = deg2rad(15.0);
  double grow_radius = 0.10;       // region growing at stair scale
  double grow_angle = deg2rad(15.0);
  std::size_t min_patch_points = 30;
  double group_radius = 0.8;       // plan distance joining patches into one candidate group
  double level_match_tol = 0.06;   // riser top vs next riser bottom agreement
  double lateral_tol = 0.5;        // riser centroid offset from the run axis
};

struct StairPatches {
  std::vector<StairPatch> treads;
  std::vector<StairPatch> risers;
};

// Finds tread/riser-like planar patches strictly between the slabs. Search
// is restricted to Stair-labeled points when labels exist and use_labels is
// set, otherwise to all non-slab points.
StairPatches detect_stair_patches(const LabeledPointCloud& cloud, const SpatialIndex& index,
                                  const NormalField& normals, const FloorCeilingLevels& levels,
                                  const StairParams& params, bool use_labels = true);

// Groups patches spatially, re-centers each group on its centroid, fits the
// run direction from riser centroids, and chains alternating risers/treads
// with monotone height into StairRuns. Patches breaking the sequence are
// dropped as outliers.
std::vector<StairRun> chain_steps(const StairPatches& patches, const StairParams& params);

// One plan-space line per riser edge plus the top tread's far edge.
std::vector<std::pair<Vec2, Vec2>> stair_plan_lines(const StairRun& run);

}  // namespace floorgen
