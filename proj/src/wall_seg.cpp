#include "floorgen/wall_seg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace floorgen {

std::vector<std::size_t> filter_wall_candidates(const LabeledPointCloud& cloud,
                                                const NormalField& normals,
                                                double vertical_tolerance, bool use_labels,
                                                Exec exec) {
  const std::size_t n = cloud.size();
  const double nz_max = std::sin(vertical_tolerance);
  const bool by_label = use_labels && cloud.has_labels();

  std::vector<char> keep(n, 0);
  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    auto idx = static_cast<std::size_t>(i);
    if (by_label && (*cloud.labels)[idx] != SemanticClass::Wall) continue;
    keep[idx] = std::abs(normals.normals[idx].z) <= nz_max ? 1 : 0;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

std::vector<std::vector<std::size_t>> region_grow(const std::vector<std::size_t>& candidates,
                                                  const LabeledPointCloud& cloud,
                                                  const SpatialIndex& index,
                                                  const NormalField& normals,
                                                  double angle_thresh, double radius,
                                                  std::size_t min_cluster) {
  const std::size_t n = cloud.size();
  const double cos_thresh = std::cos(angle_thresh);

  std::vector<char> is_candidate(n, 0);
  for (std::size_t i : candidates) is_candidate[i] = 1;
  std::vector<char> visited(n, 0);

  struct Cluster {
    std::vector<std::size_t> members;
    std::size_t seed;
  };
  std::vector<Cluster> clusters;

  std::deque<std::size_t> queue;
  for (std::size_t seed : candidates) {
    if (visited[seed]) continue;
    const Vec3 seed_normal = normals.normals[seed];
    Cluster cluster;
    cluster.seed = seed;
    visited[seed] = 1;
    queue.clear();
    queue.push_back(seed);
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      cluster.members.push_back(i);
      for (std::size_t j : index.radius_masked(cloud.positions[i], radius, is_candidate)) {
        if (visited[j]) continue;
        if (std::abs(dot(normals.normals[j], seed_normal)) < cos_thresh) continue;
        visited[j] = 1;
        queue.push_back(j);
      }
    }
    if (cluster.members.size() >= min_cluster) clusters.push_back(std::move(cluster));
  }

  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.seed < b.seed;
  });

  std::vector<std::vector<std::size_t>> out;
  out.reserve(clusters.size());
  for (Cluster& c : clusters) {
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c.members));
  }
  return out;
}

std::vector<WallInstance> parametric_filter_walls(
    const std::vector<std::vector<std::size_t>>& clusters, const LabeledPointCloud& cloud,
    const FloorCeilingLevels& levels, std::size_t min_points, double min_height_fraction) {
  const double min_height = min_height_fraction * levels.story_height();

  std::vector<WallInstance> out;
  for (const auto& members : clusters) {
    if (members.size() < min_points) continue;
    double z_lo = cloud.positions[members.front()].z, z_hi = z_lo;
    Vec3 centroid{0, 0, 0};
    for (std::size_t i : members) {
      const Vec3& p = cloud.positions[i];
      z_lo = std::min(z_lo, p.z);
      z_hi = std::max(z_hi, p.z);
      centroid = centroid + p;
    }
    if (z_hi - z_lo < min_height) continue;
    centroid = centroid * (1.0 / static_cast<double>(members.size()));

    // Vertical plane fit: total least squares on the xy footprint.
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i : members) {
      double dx = cloud.positions[i].x - centroid.x;
      double dy = cloud.positions[i].y - centroid.y;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);  // major axis of the footprint
    Vec2 dir{std::cos(angle), std::sin(angle)};
    if (dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0)) dir = dir * -1.0;

    WallInstance w;
    w.plane_normal = perp(dir);
    w.plane_offset = dot(w.plane_normal, centroid.xy());
    w.z_lo = z_lo;
    w.z_hi = z_hi;
    w.centroid = centroid;
    double ss = 0.0;
    for (std::size_t i : members) {
      double r = dot(w.plane_normal, cloud.positions[i].xy()) - w.plane_offset;
      ss += r * r;
    }
    w.inlier_rms = std::sqrt(ss / static_cast<double>(members.size()));
    w.point_indices = members;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace floorgen
