#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floorgen/door_detect.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/stair_detect.hpp"
#include "floorgen/wall_seg.hpp"

namespace floorgen {

// 2D segment with an implied carrier line. Endpoints are the primary data so
// plans survive JSON round-trips bit-exactly; direction and arc length are
// derived.
struct Line2D {
  Vec2 a{0, 0};
  Vec2 b{1, 0};

  Vec2 dir() const { return normalized(b - a); }
  double length() const { return norm(b - a); }
  Vec2 at(double t) const { return a + dir() * t; }  // t measured from a
};

// Two parallel folds tracing the wall's two surfaces in plan view.
struct WallSegment2D {
  int wall_id = -1;
  Line2D inner;
  Line2D outer;
  double thickness = 0.0;
};

using Segment2 = std::pair<Vec2, Vec2>;

struct Floorplan {
  std::vector<WallSegment2D> walls;
  std::vector<DoorOpening> doors;
  std::vector<std::vector<Segment2>> stairs;  // one line set per stair run
  std::vector<std::vector<Vec2>> rooms;       // derived; CCW polygons
};

struct TwoFoldParams {
  int iterations = 500;
  double inlier_dist = 0.02;
  double min_inlier_ratio = 0.30;        // below this the wall is degenerate
  double min_second_fold_fraction = 0.10;  // of all wall points
  double default_thickness = 0.12;       // synthesized fold for single-sided scans
  double max_thickness = 0.60;
};

// Sequential robust fit of two parallel lines to the wall's top view. The
// first RANSAC picks the dominant surface from 2-point samples; the second
// fits the opposite surface with the direction frozen (1-point samples fix
// the offset). Single-sided walls get a synthesized outer fold offset by
// default_thickness away from interior_hint. Fixed seed implies bit-identical
// output.
//
// interior_hint: plan point on the room side (e.g. the centroid of non-wall
// points); used to orient the inner/outer assignment. has_interior_hint=false
// selects the deterministic fallback rule (inner = smaller signed offset).
WallSegment2D fit_two_fold_ransac(const WallInstance& wall, const LabeledPointCloud& cloud,
                                  const TwoFoldParams& params, std::uint64_t seed,
                                  Vec2 interior_hint = {0, 0}, bool has_interior_hint = false);

struct AssembleParams {
  double snap_dist = 0.15;
  double room_resolution = 0.02;
  double min_room_area = 1.0;
};

// Corner closure (endpoints snapped onto nearby wall lines), door clipping
// into their parent walls, stair line attachment, and room derivation.
Floorplan assemble_floorplan(std::vector<WallSegment2D> walls, std::vector<DoorOpening> doors,
                             const std::vector<StairRun>& stair_runs,
                             const AssembleParams& params);

// Rooms = connected empty regions of the rasterized plan (walls filled as
// thickness bands, doors closed), flood-filled from the border, kept at
// min_room_area and larger, polygonized by boundary tracing.
std::vector<std::vector<Vec2>> segment_rooms(const Floorplan& fp, double resolution,
                                             double min_room_area);

std::string floorplan_to_json(const Floorplan& fp);
Floorplan floorplan_from_json(const std::string& text);
Floorplan load_floorplan(const std::string& path);
void save_floorplan(const Floorplan& fp, const std::string& path);

// SVG plan drawing; 1 user unit = 1 cm, layer groups walls/doors/stairs/rooms.
std::string floorplan_to_svg(const Floorplan& fp);

double polygon_area(const std::vector<Vec2>& poly);

}  // namespace floorgen
