#include "floorgen/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floorgen/error.hpp"
#include "floorgen/normals.hpp"

namespace floorgen {

Vec3 RigidTransform::apply(const Vec3& p) const {
  double c = std::cos(theta), s = std::sin(theta);
  return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y,
          p.z + translation.z};
}

Vec3 RigidTransform::invert(const Vec3& p) const {
  double c = std::cos(theta), s = std::sin(theta);
  Vec3 d = p - translation;
  return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

namespace {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::size_t idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(values.size() - 1) + 0.5));
  std::nth_element(values.begin(), values.begin() + idx, values.end());
  return values[idx];
}

// Mode of wall-normal azimuths folded into [0, 90) degrees, refined by a
// circular mean over the mode bin and its neighbors. Returns false when too
// few horizontal normals exist to define an orientation.
bool dominant_orientation(const LabeledPointCloud& cloud, const NormalizeParams& params,
                          double* theta_out) {
  std::size_t n = cloud.size();
  std::size_t stride = std::max<std::size_t>(1, n / params.orientation_max_points);
  LabeledPointCloud sub;
  for (std::size_t i = 0; i < n; i += stride) sub.positions.push_back(cloud.positions[i]);
  if (sub.size() < std::max<std::size_t>(params.orientation_k, 30)) return false;

  SpatialIndex index(sub);
  NormalField normals = estimate_normals(sub, index, params.orientation_k);

  constexpr int kBins = 90;
  std::vector<std::size_t> hist(kBins, 0);
  std::vector<double> azimuths;
  azimuths.reserve(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const Vec3& nrm = normals.normals[i];
    if (normals.degenerate[i] || std::abs(nrm.z) > 0.5) continue;
    double a = std::atan2(nrm.y, nrm.x);          // (-pi, pi]
    a = std::fmod(rad2deg(a) + 360.0, 90.0);      // fold to [0, 90)
    azimuths.push_back(a);
    ++hist[std::min(kBins - 1, static_cast<int>(a))];
  }
  if (azimuths.size() < 30) return false;

  int mode = 0;
  for (int i = 1; i < kBins; ++i)
    if (hist[i] > hist[mode]) mode = i;

  double center = mode + 0.5;
  double sum = 0.0;
  std::size_t cnt = 0;
  for (double a : azimuths) {
    double d = a - center;
    if (d > 45.0) d -= 90.0;
    if (d < -45.0) d += 90.0;
    if (std::abs(d) <= 1.5) {
      sum += d;
      ++cnt;
    }
  }
  if (cnt == 0) return false;
  double deg = center + sum / static_cast<double>(cnt);
  *theta_out = deg2rad(std::fmod(deg + 90.0, 90.0));
  return true;
}

}  // namespace

std::pair<LabeledPointCloud, RigidTransform> normalize_coordinates(
    const LabeledPointCloud& cloud, const NormalizeParams& params) {
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "normalize_coordinates: empty cloud");

  const std::size_t n = cloud.size();
  double cx = 0.0, cy = 0.0;
  std::vector<double> zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    cx += cloud.positions[i].x;
    cy += cloud.positions[i].y;
    zs[i] = cloud.positions[i].z;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  double z0 = percentile(std::move(zs), 0.01);

  double theta = 0.0;
  if (params.align_rotation) {
    double t;
    if (dominant_orientation(cloud, params, &t)) theta = t;
  }

  RigidTransform tf;
  tf.translation = {cx, cy, z0};
  tf.theta = theta;

  LabeledPointCloud out = cloud;
  for (Vec3& p : out.positions) p = tf.invert(p);
  return {std::move(out), tf};
}

LabeledPointCloud remove_statistical_outliers(const LabeledPointCloud& cloud,
                                              const SpatialIndex& index, std::size_t k,
                                              double std_ratio, Exec exec) {
  const std::size_t n = cloud.size();
  if (n <= k) throw Error(ErrorKind::TooFewPoints, "outlier removal needs N > k");

  std::vector<double> mean_dist(n);
  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic, 256) if (par)
  for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
    auto i = static_cast<std::size_t>(ii);
    std::vector<Neighbor> nb = index.knn(cloud.positions[i], k + 1);
    double sum = 0.0;
    std::size_t used = 0;
    bool skipped_self = false;
    for (const Neighbor& p : nb) {
      if (!skipped_self && p.index == i) {
        skipped_self = true;
        continue;
      }
      if (used == k) break;
      sum += std::sqrt(p.dist2);
      ++used;
    }
    mean_dist[i] = sum / static_cast<double>(used);
  }

  // Serial reduction in index order keeps the threshold bit-stable.
  double mean = 0.0;
  for (double d : mean_dist) mean += d;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double d : mean_dist) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n);
  double threshold = mean + std_ratio * std::sqrt(var);

  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(mean_dist[i] > threshold)) keep.push_back(i);
  return cloud.select(keep);
}

ZHistogram compute_z_histogram(const LabeledPointCloud& cloud, double bin_size) {
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "compute_z_histogram: empty cloud");
  if (!(bin_size > 0.0))
    throw Error(ErrorKind::NonPositiveBinSize, "bin_size must be positive");

  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -std::numeric_limits<double>::infinity();
  for (const Vec3& p : cloud.positions) {
    z_min = std::min(z_min, p.z);
    z_max = std::max(z_max, p.z);
  }
  ZHistogram h;
  h.bin_size = bin_size;
  h.z_min = z_min;
  std::size_t nbins = static_cast<std::size_t>(std::floor((z_max - z_min) / bin_size)) + 1;
  h.counts.assign(nbins, 0);
  for (const Vec3& p : cloud.positions) {
    auto bin = static_cast<std::size_t>(std::floor((p.z - z_min) / bin_size));
    ++h.counts[std::min(bin, nbins - 1)];
  }
  return h;
}

FloorCeilingLevels detect_floor_ceiling(const ZHistogram& hist, double peak_prominence,
                                        double min_story) {
  const auto& c = hist.counts;
  if (c.empty()) throw Error(ErrorKind::NoPeaksFound, "empty histogram");
  std::size_t max_count = *std::max_element(c.begin(), c.end());
  double floor_count = peak_prominence * static_cast<double>(max_count);

  std::vector<std::size_t> peaks;
  const long long nb = static_cast<long long>(c.size());
  for (long long i = 0; i < nb; ++i) {
    if (static_cast<double>(c[i]) < floor_count) continue;
    bool local_max = true;
    for (long long j = std::max(0LL, i - 3); j <= std::min(nb - 1, i + 3); ++j)
      if (c[j] > c[i]) { local_max = false; break; }
    if (local_max) peaks.push_back(static_cast<std::size_t>(i));
  }

  if (!peaks.empty()) {
    double z_floor = hist.bin_center(peaks.front());
    for (std::size_t i = peaks.size(); i-- > 0;) {
      double z_ceiling = hist.bin_center(peaks[i]);
      if (z_ceiling - z_floor >= min_story - 1e-9) {
        FloorCeilingLevels lv;
        lv.z_floor = z_floor;
        lv.z_ceiling = z_ceiling;
        lv.slab_tolerance = 2.0 * hist.bin_size;
        return lv;
      }
    }
  }
  throw Error(ErrorKind::NoPeaksFound,
              "fewer than 2 qualifying z-histogram peaks at least " +
                  std::to_string(min_story) + " m apart");
}

FloorCeilingLevels fallback_levels(const LabeledPointCloud& cloud, double bin_size,
                                   double min_story) {
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "fallback_levels: empty cloud");
  std::vector<double> zs(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) zs[i] = cloud.positions[i].z;
  FloorCeilingLevels lv;
  lv.z_floor = percentile(zs, 0.01);
  lv.z_ceiling = std::max(percentile(std::move(zs), 0.99), lv.z_floor + min_story);
  lv.slab_tolerance = 2.0 * bin_size;
  return lv;
}

}  // namespace floorgen
