#include "floorgen/floorplan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floorgen/error.hpp"
#include "floorgen/rng.hpp"

namespace floorgen {

namespace {

double percentile(std::vector<double> values, double q) {
  std::size_t idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(values.size() - 1) + 0.5));
  std::nth_element(values.begin(), values.begin() + idx, values.end());
  return values[idx];
}

Vec2 canonical_dir(Vec2 d) {
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) return d * -1.0;
  return d;
}

// Total-least-squares line through a 2D point set: returns unit direction.
Vec2 tls_direction(const std::vector<Vec2>& pts, const Vec2& centroid) {
  double sxx = 0, sxy = 0, syy = 0;
  for (const Vec2& p : pts) {
    double dx = p.x - centroid.x, dy = p.y - centroid.y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  return canonical_dir({std::cos(angle), std::sin(angle)});
}

}  // namespace

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

WallSegment2D fit_two_fold_ransac(const WallInstance& wall, const LabeledPointCloud& cloud,
                                  const TwoFoldParams& params, std::uint64_t seed,
                                  Vec2 interior_hint, bool has_interior_hint) {
  const std::size_t n = wall.point_indices.size();
  if (n < 20)
    throw Error(ErrorKind::TooFewPoints, "two-fold RANSAC needs at least 20 wall points");

  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i : wall.point_indices) pts.push_back(cloud.positions[i].xy());

  SplitMix64 rng(seed);

  // First fold: dominant surface line from 2-point minimal sets.
  std::size_t best_count = 0;
  Vec2 best_normal{0, 0};
  double best_offset = 0.0;
  for (int iter = 0; iter < params.iterations; ++iter) {
    std::size_t a = rng.next_index(n);
    std::size_t b = rng.next_index(n);
    Vec2 d = pts[b] - pts[a];
    if (a == b || norm2(d) < 1e-18) continue;
    Vec2 nrm = normalized(perp(d));
    double off = dot(nrm, pts[a]);
    std::size_t count = 0;
    for (const Vec2& p : pts)
      if (std::abs(dot(nrm, p) - off) <= params.inlier_dist) ++count;
    if (count > best_count) {
      best_count = count;
      best_normal = nrm;
      best_offset = off;
    }
  }
  if (static_cast<double>(best_count) <
      params.min_inlier_ratio * static_cast<double>(n))
    throw Error(ErrorKind::DegenerateWall,
                "first RANSAC fold captured " + std::to_string(best_count) + " of " +
                    std::to_string(n) + " points");

  // Least-squares refinement on the winning sample's inliers.
  std::vector<Vec2> inliers1;
  Vec2 c1{0, 0};
  for (const Vec2& p : pts)
    if (std::abs(dot(best_normal, p) - best_offset) <= params.inlier_dist) {
      inliers1.push_back(p);
      c1 = c1 + p;
    }
  c1 = c1 * (1.0 / static_cast<double>(inliers1.size()));
  Vec2 dir = tls_direction(inliers1, c1);
  Vec2 nrm = perp(dir);
  double off1 = dot(nrm, c1);

  // Second fold: same direction, offset fit on the leftover points.
  std::vector<Vec2> rest;
  std::size_t fold1_count = 0;
  for (const Vec2& p : pts) {
    if (std::abs(dot(nrm, p) - off1) <= params.inlier_dist) ++fold1_count;
    else rest.push_back(p);
  }

  bool second_real = false;
  double off2 = 0.0;
  if (!rest.empty()) {
    std::size_t best2 = 0;
    double best_off2 = 0.0;
    for (int iter = 0; iter < params.iterations; ++iter) {
      const Vec2& anchor = rest[rng.next_index(rest.size())];
      double off = dot(nrm, anchor);
      std::size_t count = 0;
      for (const Vec2& p : rest)
        if (std::abs(dot(nrm, p) - off) <= params.inlier_dist) ++count;
      if (count > best2) {
        best2 = count;
        best_off2 = off;
      }
    }
    if (static_cast<double>(best2) >=
        params.min_second_fold_fraction * static_cast<double>(n)) {
      double sum = 0.0;
      std::size_t cnt = 0;
      for (const Vec2& p : rest) {
        double o = dot(nrm, p);
        if (std::abs(o - best_off2) <= params.inlier_dist) {
          sum += o;
          ++cnt;
        }
      }
      off2 = sum / static_cast<double>(cnt);
      double thickness = std::abs(off2 - off1);
      if (thickness > 1e-6 && thickness <= params.max_thickness) second_real = true;
    }
  }

  if (!second_real) {
    // Single-sided scan: synthesize the hidden fold on the far side of the
    // room interior (or at +normal when there is no interior reference).
    double side = 1.0;
    if (has_interior_hint) {
      double s = off1 - dot(nrm, interior_hint);
      side = s >= 0.0 ? 1.0 : -1.0;
    }
    off2 = off1 + side * params.default_thickness;
  }

  // Inner fold faces the room interior.
  double inner_off, outer_off;
  if (has_interior_hint) {
    double hint_off = dot(nrm, interior_hint);
    if (std::abs(off1 - hint_off) <= std::abs(off2 - hint_off)) {
      inner_off = off1;
      outer_off = off2;
    } else {
      inner_off = off2;
      outer_off = off1;
    }
  } else {
    inner_off = std::min(off1, off2);
    outer_off = std::max(off1, off2);
  }

  auto make_fold = [&](double off, const std::vector<Vec2>& members) {
    std::vector<double> ts;
    ts.reserve(members.size());
    for (const Vec2& p : members)
      if (std::abs(dot(nrm, p) - off) <= params.inlier_dist) ts.push_back(dot(p, dir));
    if (ts.empty())
      for (const Vec2& p : members) ts.push_back(dot(p, dir));
    double t_lo = percentile(ts, 0.01);
    double t_hi = percentile(ts, 0.99);
    Vec2 anchor = nrm * off;
    return Line2D{anchor + dir * t_lo, anchor + dir * t_hi};
  };

  WallSegment2D seg;
  Line2D fold1 = make_fold(off1, pts);
  Line2D fold2;
  if (second_real) {
    fold2 = make_fold(off2, rest);
  } else {
    Vec2 shift = nrm * (off2 - off1);
    fold2 = Line2D{fold1.a + shift, fold1.b + shift};
  }
  if (inner_off == off1) {
    seg.inner = fold1;
    seg.outer = fold2;
  } else {
    seg.inner = fold2;
    seg.outer = fold1;
  }
  seg.thickness = std::abs(outer_off - inner_off);
  return seg;
}

Floorplan assemble_floorplan(std::vector<WallSegment2D> walls, std::vector<DoorOpening> doors,
                             const std::vector<StairRun>& stair_runs,
                             const AssembleParams& params) {
  // Corner closure: move each fold endpoint along its own carrier line to the
  // nearest intersection with another wall's fold line, when that
  // intersection lies within snap_dist and near the other fold's extent. All
  // decisions are made on the pre-snap geometry and applied at once.
  struct Move {
    std::size_t wall, fold, end;  // fold: 0 inner 1 outer; end: 0 a, 1 b
    Vec2 target;
  };
  std::vector<Move> moves;
  auto fold_of = [](WallSegment2D& w, std::size_t f) -> Line2D& {
    return f == 0 ? w.inner : w.outer;
  };

  for (std::size_t wi = 0; wi < walls.size(); ++wi) {
    for (std::size_t f = 0; f < 2; ++f) {
      const Line2D& line = fold_of(walls[wi], f);
      Vec2 dir = line.dir();
      for (std::size_t e = 0; e < 2; ++e) {
        double t_end = e == 0 ? 0.0 : line.length();
        double best_dt = params.snap_dist;
        Vec2 best_target;
        bool found = false;
        for (std::size_t wj = 0; wj < walls.size(); ++wj) {
          if (wj == wi) continue;
          for (std::size_t g = 0; g < 2; ++g) {
            const Line2D& other = fold_of(walls[wj], g);
            Vec2 odir = other.dir();
            double denom = cross(dir, odir);
            if (std::abs(denom) < 1e-9) continue;  // near-parallel
            // Solve line.a + t*dir = other.a + s*odir.
            Vec2 dp = other.a - line.a;
            double t = cross(dp, odir) / denom;
            double s = cross(dp, dir) / denom;
            if (s < -params.snap_dist || s > other.length() + params.snap_dist) continue;
            double dt = std::abs(t - t_end);
            if (dt <= best_dt) {
              best_dt = dt;
              best_target = line.a + dir * t;
              found = true;
            }
          }
        }
        if (found) moves.push_back({wi, f, e, best_target});
      }
    }
  }
  for (const Move& m : moves) {
    Line2D& line = fold_of(walls[m.wall], m.fold);
    Line2D candidate = line;
    (m.end == 0 ? candidate.a : candidate.b) = m.target;
    if (candidate.length() > 1e-6) line = candidate;
  }

  // Doors: re-express on the parent wall's inner fold and clip to its extent.
  std::vector<DoorOpening> kept_doors;
  for (DoorOpening d : doors) {
    if (d.wall_id < 0 || d.wall_id >= static_cast<int>(walls.size())) continue;
    const Line2D& inner = walls[static_cast<std::size_t>(d.wall_id)].inner;
    double u_c = dot(d.center - inner.a, inner.dir());
    double u_lo = std::max(u_c - 0.5 * d.width, 0.0);
    double u_hi = std::min(u_c + 0.5 * d.width, inner.length());
    if (u_hi - u_lo <= 1e-6) continue;
    d.u_lo = u_lo;
    d.u_hi = u_hi;
    d.width = u_hi - u_lo;
    d.center = inner.at(0.5 * (u_lo + u_hi));
    kept_doors.push_back(d);
  }

  Floorplan fp;
  fp.walls = std::move(walls);
  fp.doors = std::move(kept_doors);
  for (const StairRun& run : stair_runs) fp.stairs.push_back(stair_plan_lines(run));
  fp.rooms = segment_rooms(fp, params.room_resolution, params.min_room_area);
  return fp;
}

}  // namespace floorgen
