#pragma once

#include <cstddef>
#include <vector>

#include "floorgen/exec.hpp"
#include "floorgen/normals.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/preprocess.hpp"
#include "floorgen/spatial_index.hpp"

namespace floorgen {

// A clustered, plane-fitted set of wall points. The plane is exactly
// vertical: unit horizontal normal n with n . (x, y) = d for plane points.
struct WallInstance {
  std::vector<std::size_t> point_indices;  // ascending, into the source cloud
  Vec2 plane_normal{1, 0};
  double plane_offset = 0.0;
  double z_lo = 0.0;
  double z_hi = 0.0;
  Vec3 centroid{0, 0, 0};
  double inlier_rms = 0.0;
};

// Points whose normals are horizontal within vertical_tolerance, i.e. whose
// surfaces stand perpendicular to the floor. When the cloud carries labels
// and use_labels is set, only Wall-labeled points are considered.
std::vector<std::size_t> filter_wall_candidates(const LabeledPointCloud& cloud,
                                                const NormalField& normals,
                                                double vertical_tolerance,
                                                bool use_labels = true,
                                                Exec exec = Exec::Parallel);

// Seeded region growing over the candidate set. Seeds are taken in ascending
// index order; a point joins a cluster when it lies within `radius` of a
// member and its normal agrees with the SEED normal within angle_thresh
// (antipodal normals identified). Clusters below min_cluster are dropped but
// stay consumed. Output is ordered by descending size, then ascending seed
// index; members are sorted ascending. Sequential by contract: the result
// must equal the seed-order reference exactly.
std::vector<std::vector<std::size_t>> region_grow(const std::vector<std::size_t>& candidates,
                                                  const LabeledPointCloud& cloud,
                                                  const SpatialIndex& index,
                                                  const NormalField& normals,
                                                  double angle_thresh, double radius,
                                                  std::size_t min_cluster);

// Keeps clusters with enough points and enough vertical extent relative to
// the story height, then least-squares fits a vertical plane (a 2D line in
// xy) to each survivor.
std::vector<WallInstance> parametric_filter_walls(
    const std::vector<std::vector<std::size_t>>& clusters, const LabeledPointCloud& cloud,
    const FloorCeilingLevels& levels, std::size_t min_points, double min_height_fraction);

}  // namespace floorgen
