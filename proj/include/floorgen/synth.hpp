#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floorgen/annotate.hpp"
#include "floorgen/floorplan.hpp"
#include "floorgen/point_cloud.hpp"

namespace floorgen {

struct WallSpec {
  Vec2 a{0, 0};
  Vec2 b{1, 0};
  double thickness = 0.12;
};

struct DoorSpec {
  std::size_t wall = 0;  // index into BuildingSpec::walls
  double u = 0.0;        // center position along the wall centerline
  double width = 0.9;
  double height = 2.1;
};

struct StairSpec {
  Vec2 origin{0, 0};
  Vec2 direction{1, 0};
  std::size_t steps = 10;
  double riser = 0.17;
  double tread = 0.28;
  double width = 1.2;
};

struct OcclusionDisk {
  Vec2 center{0, 0};
  double radius = 0.5;
};

struct OcclusionHalfPlane {
  Vec2 normal{1, 0};
  double offset = 0.0;  // deletes points with dot(normal, xy) >= offset
};

// Synthetic labeled building: walls sampled on both faces, slabs, stair
// risers/treads, uniform clutter plus box furniture, Gaussian surface noise,
// and plan-space occlusion masks. Fully determined by the seed.
struct BuildingSpec {
  double story_height = 2.7;
  std::vector<WallSpec> walls;
  std::vector<DoorSpec> doors;
  std::optional<StairSpec> stairs;
  double density = 1500.0;        // points per m^2 of surface
  double noise_sigma = 0.0;       // along the surface normal
  double clutter_density = 0.0;   // points per m^3 of interior volume
  std::size_t furniture_boxes = 0;
  std::vector<OcclusionDisk> occlusion_disks;
  std::vector<OcclusionHalfPlane> occlusion_halfplanes;
  bool slabs = true;  // emit floor/ceiling surfaces
  std::uint64_t seed = 0;
};

// Generates the cloud and the exact ground-truth floorplan (2-fold walls at
// +-thickness/2, doors, stair lines, derived rooms).
std::pair<LabeledPointCloud, Floorplan> generate_building(const BuildingSpec& spec);

// Ground truth only; skips point sampling.
Floorplan ground_truth_floorplan(const BuildingSpec& spec);

// The wall/door/stair polylines a 2D drawing of this building would contain.
DrawingSet drawing_from_spec(const BuildingSpec& spec);

// Fixed fixture set standing in for a real scan corpus: rect1, tworoom,
// corridor, lshape, stairhall, cluttered, nocolor-noslab.
std::vector<std::pair<std::string, BuildingSpec>> standard_corpus(std::uint64_t seed);

BuildingSpec corpus_fixture(const std::string& name, std::uint64_t seed);

}  // namespace floorgen
