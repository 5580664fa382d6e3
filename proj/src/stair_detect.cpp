#include "floorgen/stair_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "floorgen/wall_seg.hpp"

namespace floorgen {

namespace {

StairPatch make_patch(const std::vector<std::size_t>& members, const LabeledPointCloud& cloud) {
  StairPatch p;
  p.point_indices = members;
  p.z_lo = cloud.positions[members.front()].z;
  p.z_hi = p.z_lo;
  for (std::size_t i : members) {
    const Vec3& q = cloud.positions[i];
    p.centroid = p.centroid + q;
    p.z_lo = std::min(p.z_lo, q.z);
    p.z_hi = std::max(p.z_hi, q.z);
  }
  p.centroid = p.centroid * (1.0 / static_cast<double>(members.size()));
  return p;
}

double median(std::vector<double> v) {
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

StairPatches detect_stair_patches(const LabeledPointCloud& cloud, const SpatialIndex& index,
                                  const NormalField& normals, const FloorCeilingLevels& levels,
                                  const StairParams& params, bool use_labels) {
  const std::size_t n = cloud.size();
  const bool by_label = use_labels && cloud.has_labels();
  const double cos_tread = std::cos(params.patch_angle_tol);
  const double sin_riser = std::sin(params.patch_angle_tol);
  const double z_lo_gate = levels.z_floor + levels.slab_tolerance;
  const double z_hi_gate = levels.z_ceiling - levels.slab_tolerance;

  std::vector<std::size_t> tread_cand, riser_cand;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = cloud.positions[i];
    if (p.z <= z_lo_gate || p.z >= z_hi_gate) continue;
    if (by_label && (*cloud.labels)[i] != SemanticClass::Stair) continue;
    if (normals.degenerate[i]) continue;
    double nz = std::abs(normals.normals[i].z);
    if (nz >= cos_tread) tread_cand.push_back(i);
    else if (nz <= sin_riser) riser_cand.push_back(i);
  }

  StairPatches out;
  for (const auto& members : region_grow(tread_cand, cloud, index, normals, params.grow_angle,
                                         params.grow_radius, params.min_patch_points))
    out.treads.push_back(make_patch(members, cloud));
  for (const auto& members : region_grow(riser_cand, cloud, index, normals, params.grow_angle,
                                         params.grow_radius, params.min_patch_points)) {
    StairPatch p = make_patch(members, cloud);
    double extent = p.z_hi - p.z_lo;
    if (extent >= params.riser_min - 0.05 && extent <= params.riser_max + 0.05)
      out.risers.push_back(std::move(p));
  }
  return out;
}

std::vector<StairRun> chain_steps(const StairPatches& patches, const StairParams& params) {
  struct Tagged {
    const StairPatch* patch;
    bool is_riser;
  };
  std::vector<Tagged> all;
  for (const StairPatch& p : patches.treads) all.push_back({&p, false});
  for (const StairPatch& p : patches.risers) all.push_back({&p, true});
  if (all.empty()) return {};

  DisjointSet groups(all.size());
  const double r2 = params.group_radius * params.group_radius;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (norm2(all[i].patch->centroid.xy() - all[j].patch->centroid.xy()) <= r2)
        groups.unite(i, j);

  std::vector<std::vector<std::size_t>> grouped(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) grouped[groups.find(i)].push_back(i);

  std::vector<StairRun> runs;
  for (const auto& group : grouped) {
    std::vector<const StairPatch*> risers, treads;
    for (std::size_t gi : group)
      (all[gi].is_riser ? risers : treads).push_back(all[gi].patch);
    if (risers.size() < params.min_steps) continue;

    // The adaptive re-centering step: all further geometry is relative to
    // the group centroid, which makes the fit translation-equivariant.
    Vec3 center{0, 0, 0};
    for (std::size_t gi : group) center = center + all[gi].patch->centroid;
    center = center * (1.0 / static_cast<double>(group.size()));

    double sxx = 0, sxy = 0, syy = 0;
    for (const StairPatch* r : risers) {
      Vec2 d = r->centroid.xy() - center.xy();
      sxx += d.x * d.x;
      sxy += d.x * d.y;
      syy += d.y * d.y;
    }
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    Vec2 dir{std::cos(angle), std::sin(angle)};

    struct RiserInfo {
      double u, v, z_lo, z_hi;
    };
    std::vector<RiserInfo> ri;
    ri.reserve(risers.size());
    for (const StairPatch* r : risers) {
      Vec2 d = r->centroid.xy() - center.xy();
      ri.push_back({dot(d, dir), cross(dir, d), r->z_lo, r->z_hi});
    }

    // Ascend along +u: flip the direction if height falls with u.
    double slope = 0.0, mean_u = 0.0, mean_z = 0.0;
    for (const RiserInfo& r : ri) {
      mean_u += r.u;
      mean_z += 0.5 * (r.z_lo + r.z_hi);
    }
    mean_u /= static_cast<double>(ri.size());
    mean_z /= static_cast<double>(ri.size());
    for (const RiserInfo& r : ri)
      slope += (r.u - mean_u) * (0.5 * (r.z_lo + r.z_hi) - mean_z);
    if (slope < 0.0) {
      dir = dir * -1.0;
      for (RiserInfo& r : ri) {
        r.u = -r.u;
        r.v = -r.v;
      }
    }

    std::sort(ri.begin(), ri.end(), [](const RiserInfo& a, const RiserInfo& b) {
      return a.u < b.u;
    });

    // Off-axis patches are outliers relative to the run corridor.
    {
      std::vector<double> vs;
      vs.reserve(ri.size());
      for (const RiserInfo& r : ri) vs.push_back(r.v);
      double v_med = median(vs);
      std::erase_if(ri, [&](const RiserInfo& r) {
        return std::abs(r.v - v_med) > params.lateral_tol;
      });
    }
    if (ri.size() < params.min_steps) continue;

    // Greedy alternation chain: each next riser must sit one tread away and
    // start where the previous riser topped out.
    std::vector<RiserInfo> chain{ri.front()};
    for (std::size_t i = 1; i < ri.size(); ++i) {
      const RiserInfo& prev = chain.back();
      const RiserInfo& cur = ri[i];
      double du = cur.u - prev.u;
      if (du < params.tread_min || du > params.tread_max) continue;
      if (std::abs(cur.z_lo - prev.z_hi) > params.level_match_tol) continue;
      chain.push_back(cur);
    }
    if (chain.size() < params.min_steps) continue;

    std::vector<double> heights;
    heights.reserve(chain.size());
    for (const RiserInfo& r : chain) heights.push_back(r.z_hi - r.z_lo);
    double h_med = median(heights);

    StairRun run;
    run.direction = dir;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      double h = chain[i].z_hi - chain[i].z_lo;
      if (std::abs(h - h_med) > params.riser_uniformity) continue;
      if (h < params.riser_min || h > params.riser_max) continue;
      StairStep step;
      step.riser_u = chain[i].u;
      step.riser_height = h;
      step.tread_z = chain[i].z_hi;
      step.tread_depth = i + 1 < chain.size() ? chain[i + 1].u - chain[i].u : 0.0;
      run.steps.push_back(step);
    }
    if (run.steps.size() < params.min_steps) continue;
    // The top step has no successor; give it the run's typical depth.
    std::vector<double> depths;
    for (std::size_t i = 0; i + 1 < run.steps.size(); ++i)
      depths.push_back(run.steps[i].tread_depth);
    run.steps.back().tread_depth = depths.empty() ? params.tread_min : median(depths);

    // Footprint: run corridor from the member points of every kept patch.
    double u_lo = run.steps.front().riser_u;
    double u_hi = run.steps.back().riser_u + run.steps.back().tread_depth;
    double v_lo = 0.0, v_hi = 0.0;
    bool first = true;
    for (std::size_t gi : group) {
      Vec2 d = all[gi].patch->centroid.xy() - center.xy();
      double u = dot(d, dir);
      if (u < u_lo - params.tread_max || u > u_hi + params.tread_max) continue;
      double v = cross(dir, d);
      if (first) {
        v_lo = v_hi = v;
        first = false;
      } else {
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
      }
    }
    v_lo -= 0.3;  // patch centroids sit mid-width; pad to the step edges
    v_hi += 0.3;
    Vec2 c = center.xy();
    Vec2 lateral = perp(dir);
    run.footprint = {c + dir * u_lo + lateral * v_lo, c + dir * u_hi + lateral * v_lo,
                     c + dir * u_hi + lateral * v_hi, c + dir * u_lo + lateral * v_hi};
    runs.push_back(std::move(run));
  }

  std::sort(runs.begin(), runs.end(), [](const StairRun& a, const StairRun& b) {
    Vec2 ca{0, 0}, cb{0, 0};
    for (const Vec2& p : a.footprint) ca = ca + p * (1.0 / 4.0);
    for (const Vec2& p : b.footprint) cb = cb + p * (1.0 / 4.0);
    return ca.x < cb.x || (ca.x == cb.x && ca.y < cb.y);
  });
  return runs;
}

std::vector<std::pair<Vec2, Vec2>> stair_plan_lines(const StairRun& run) {
  std::vector<std::pair<Vec2, Vec2>> lines;
  if (run.footprint.size() != 4) return lines;
  // footprint = [lo/lo, hi/lo, hi/hi, lo/hi] corners in (u, v)
  Vec2 origin_lo = run.footprint[0];
  Vec2 origin_hi = run.footprint[3];
  double u0 = 0.0;  // footprint starts at the first riser
  for (const StairStep& s : run.steps) {
    double du = s.riser_u - run.steps.front().riser_u + u0;
    lines.emplace_back(origin_lo + run.direction * du, origin_hi + run.direction * du);
  }
  const StairStep& last = run.steps.back();
  double du = last.riser_u - run.steps.front().riser_u + last.tread_depth;
  lines.emplace_back(origin_lo + run.direction * du, origin_hi + run.direction * du);
  return lines;
}

}  // namespace floorgen
