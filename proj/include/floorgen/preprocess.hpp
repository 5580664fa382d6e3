#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "floorgen/exec.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/spatial_index.hpp"

namespace floorgen {

// Translation plus yaw; maps normalized coordinates back to the original
// frame: original = Rz(theta) * p + translation.
struct RigidTransform {
  Vec3 translation{0, 0, 0};
  double theta = 0.0;

  Vec3 apply(const Vec3& p) const;
  Vec3 invert(const Vec3& p) const;
};

struct NormalizeParams {
  bool align_rotation = true;  // Manhattan-world alignment; disable for non-rectilinear sites
  std::size_t orientation_k = 16;
  std::size_t orientation_max_points = 100000;  // stride subsample cap for the coarse pass
};

// Centers x/y on the centroid, puts the 1st-percentile z at 0, and rotates the
// dominant wall direction (mode of horizontal normal azimuths folded mod 90
// degrees) onto the x-axis. Degenerate orientation falls back to theta = 0.
std::pair<LabeledPointCloud, RigidTransform> normalize_coordinates(
    const LabeledPointCloud& cloud, const NormalizeParams& params = {});

// Statistical kNN filter: removes points whose mean distance to their k
// nearest neighbors exceeds global_mean + std_ratio * global_stddev.
LabeledPointCloud remove_statistical_outliers(const LabeledPointCloud& cloud,
                                              const SpatialIndex& index, std::size_t k,
                                              double std_ratio, Exec exec = Exec::Parallel);

struct ZHistogram {
  double bin_size = 0.05;
  double z_min = 0.0;
  std::vector<std::size_t> counts;

  double bin_center(std::size_t i) const { return z_min + (static_cast<double>(i) + 0.5) * bin_size; }
};

ZHistogram compute_z_histogram(const LabeledPointCloud& cloud, double bin_size);

struct FloorCeilingLevels {
  double z_floor = 0.0;
  double z_ceiling = 0.0;
  double slab_tolerance = 0.1;

  double story_height() const { return z_ceiling - z_floor; }
};

// Picks the lowest and highest qualifying histogram peaks (count >= prominence
// * max, local maximum over a +-3 bin window) at least min_story apart.
// Throws NoPeaksFound when no such pair exists, e.g. clouds without
// floor/ceiling surface points; callers then use fallback_levels().
FloorCeilingLevels detect_floor_ceiling(const ZHistogram& hist, double peak_prominence,
                                        double min_story = 1.5);

// 1st/99th z-percentile stand-in for slab-free clouds.
FloorCeilingLevels fallback_levels(const LabeledPointCloud& cloud, double bin_size,
                                   double min_story = 1.5);

}  // namespace floorgen
