#include "floorgen/door_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floorgen/error.hpp"

namespace floorgen {

WallGrid build_wall_grid(const WallInstance& wall, int wall_id, const LabeledPointCloud& cloud,
                         const FloorCeilingLevels& levels, double cell) {
  if (wall.point_indices.empty())
    throw Error(ErrorKind::TooFewPoints, "build_wall_grid: wall instance has no points");

  WallGrid grid;
  grid.wall_id = wall_id;
  grid.cell = cell;
  grid.u_dir = perp(wall.plane_normal);  // unit, along the wall line
  if (grid.u_dir.x < 0.0 || (grid.u_dir.x == 0.0 && grid.u_dir.y < 0.0))
    grid.u_dir = grid.u_dir * -1.0;

  const double plane_gate = 3.0 * wall.inlier_rms + 0.02;
  const double story = levels.story_height();
  const Vec2 line_point = wall.centroid.xy();

  struct UV { double u, v; };
  std::vector<UV> uvs;
  uvs.reserve(wall.point_indices.size());
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -std::numeric_limits<double>::infinity();
  for (std::size_t idx : wall.point_indices) {
    const Vec3& p = cloud.positions[idx];
    if (std::abs(dot(wall.plane_normal, p.xy()) - wall.plane_offset) > plane_gate) continue;
    double u = dot(p.xy() - line_point, grid.u_dir);
    double v = p.z - levels.z_floor;
    if (v < 0.0 || v > story) continue;
    uvs.push_back({u, v});
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  if (uvs.empty()) {
    grid.origin = line_point;
    return grid;
  }

  grid.origin = line_point + grid.u_dir * u_min;
  grid.u_bins = static_cast<std::size_t>(std::floor((u_max - u_min) / cell)) + 1;
  grid.v_bins = static_cast<std::size_t>(std::ceil(story / cell - 1e-9));
  grid.v_bins = std::max<std::size_t>(grid.v_bins, 1);
  grid.occupancy.assign(grid.u_bins * grid.v_bins, 0);
  for (const UV& uv : uvs) {
    auto ub = std::min(grid.u_bins - 1,
                       static_cast<std::size_t>(std::floor((uv.u - u_min) / cell)));
    auto vb = std::min(grid.v_bins - 1, static_cast<std::size_t>(std::floor(uv.v / cell)));
    ++grid.occupancy[ub * grid.v_bins + vb];
  }
  return grid;
}

std::vector<OpeningCandidate> find_empty_openings(const WallGrid& grid, double min_clear_height,
                                                  bool include_boundary) {
  std::vector<OpeningCandidate> out;
  if (grid.u_bins == 0) return out;

  const std::size_t clear_rows =
      std::min(grid.v_bins, static_cast<std::size_t>(std::ceil(min_clear_height / grid.cell - 1e-9)));

  std::vector<char> clear(grid.u_bins, 1);
  for (std::size_t u = 0; u < grid.u_bins; ++u)
    for (std::size_t v = 0; v < clear_rows; ++v)
      if (grid.at(u, v) != 0) {
        clear[u] = 0;
        break;
      }

  std::size_t u = 0;
  while (u < grid.u_bins) {
    if (!clear[u]) {
      ++u;
      continue;
    }
    std::size_t begin = u;
    while (u < grid.u_bins && clear[u]) ++u;
    std::size_t end = u;  // [begin, end)

    OpeningCandidate cand;
    cand.at_boundary = begin == 0 || end == grid.u_bins;
    if (cand.at_boundary && !include_boundary) continue;
    cand.u_lo = static_cast<double>(begin) * grid.cell;
    cand.u_hi = static_cast<double>(end) * grid.cell;

    std::size_t v = clear_rows;
    for (; v < grid.v_bins; ++v) {
      bool row_empty = true;
      for (std::size_t uu = begin; uu < end; ++uu)
        if (grid.at(uu, v) != 0) {
          row_empty = false;
          break;
        }
      if (!row_empty) break;
    }
    cand.height = static_cast<double>(v) * grid.cell;
    out.push_back(cand);
  }
  return out;
}

std::vector<DoorOpening> parametric_filter_doors(const std::vector<OpeningCandidate>& candidates,
                                                 const WallGrid& grid, const DoorBounds& bounds) {
  std::vector<DoorOpening> out;
  for (const OpeningCandidate& c : candidates) {
    double width = c.u_hi - c.u_lo;
    if (width < bounds.width_min || width > bounds.width_max) continue;
    if (c.height < bounds.height_min || c.height > bounds.height_max) continue;
    double aspect = c.height / width;
    if (aspect < bounds.aspect_min || aspect > bounds.aspect_max) continue;
    DoorOpening door;
    door.wall_id = grid.wall_id;
    door.u_lo = c.u_lo;
    door.u_hi = c.u_hi;
    door.width = width;
    door.height = c.height;
    door.center = grid.origin + grid.u_dir * (0.5 * (c.u_lo + c.u_hi));
    out.push_back(door);
  }
  return out;
}

std::vector<DoorOpening> detect_doors(const std::vector<WallInstance>& walls,
                                      const LabeledPointCloud& cloud,
                                      const FloorCeilingLevels& levels, double cell,
                                      double min_clear_height, const DoorBounds& bounds) {
  std::vector<std::vector<DoorOpening>> per_wall(walls.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(walls.size()); ++i) {
    auto w = static_cast<std::size_t>(i);
    WallGrid grid = build_wall_grid(walls[w], static_cast<int>(w), cloud, levels, cell);
    per_wall[w] = parametric_filter_doors(find_empty_openings(grid, min_clear_height), grid, bounds);
  }
  std::vector<DoorOpening> out;
  for (const auto& doors : per_wall) out.insert(out.end(), doors.begin(), doors.end());
  return out;
}

}  // namespace floorgen
