#include "floorgen/normals.hpp"

#include <algorithm>
#include <cmath>

#include "floorgen/error.hpp"

namespace floorgen {
namespace detail {

void sym3_eigenvalues(const Sym3& m, double out[3]) {
  double p1 = m.xy * m.xy + m.xz * m.xz + m.yz * m.yz;
  if (p1 == 0.0) {
    out[0] = m.xx;
    out[1] = m.yy;
    out[2] = m.zz;
    std::sort(out, out + 3);
    return;
  }
  double q = (m.xx + m.yy + m.zz) / 3.0;
  double p2 = (m.xx - q) * (m.xx - q) + (m.yy - q) * (m.yy - q) + (m.zz - q) * (m.zz - q) +
              2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  double bxx = (m.xx - q) / p, byy = (m.yy - q) / p, bzz = (m.zz - q) / p;
  double bxy = m.xy / p, bxz = m.xz / p, byz = m.yz / p;
  double detb = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                bxz * (bxy * byz - byy * bxz);
  double r = std::clamp(detb / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double e_hi = q + 2.0 * p * std::cos(phi);
  double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  out[0] = e_lo;
  out[1] = 3.0 * q - e_lo - e_hi;
  out[2] = e_hi;
}

bool sym3_min_eigenvector(const Sym3& m, Vec3* out) {
  double ev[3];
  sym3_eigenvalues(m, ev);
  double scale = std::max({std::abs(ev[2]), std::abs(ev[0]), 1e-300});
  // Rank < 2: the two small eigenvalues coincide at ~0, no unique direction.
  if (ev[1] - ev[0] <= 1e-9 * scale && std::abs(ev[1]) <= 1e-9 * scale) return false;

  double l = ev[0];
  Vec3 r0{m.xx - l, m.xy, m.xz};
  Vec3 r1{m.xy, m.yy - l, m.yz};
  Vec3 r2{m.xz, m.yz, m.zz - l};
  Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  double n01 = norm2(c01), n02 = norm2(c02), n12 = norm2(c12);
  Vec3 best = c01;
  double bestn = n01;
  if (n02 > bestn) { best = c02; bestn = n02; }
  if (n12 > bestn) { best = c12; bestn = n12; }
  if (bestn <= 1e-24 * scale * scale * scale * scale) {
    // Rows nearly proportional; fall back to the axis of smallest diagonal.
    double d[3] = {m.xx, m.yy, m.zz};
    int axis = 0;
    if (d[1] < d[axis]) axis = 1;
    if (d[2] < d[axis]) axis = 2;
    *out = axis == 0 ? Vec3{1, 0, 0} : axis == 1 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
    return true;
  }
  *out = normalized(best);
  return true;
}

Vec3 hemisphere_normalize(Vec3 n) {
  bool flip;
  if (std::abs(n.z) > 1e-9) flip = n.z < 0.0;
  else if (std::abs(n.y) > 1e-9) flip = n.y < 0.0;
  else flip = n.x < 0.0;
  return flip ? Vec3{-n.x, -n.y, -n.z} : n;
}

}  // namespace detail

NormalField estimate_normals(const LabeledPointCloud& cloud, const SpatialIndex& index,
                             std::size_t k, Exec exec) {
  const std::size_t n = cloud.size();
  if (k < 3) throw Error(ErrorKind::TooFewPoints, "normal estimation needs k >= 3");
  if (n < k) throw Error(ErrorKind::TooFewPoints, "normal estimation needs N >= k");

  NormalField field;
  field.normals.resize(n);
  field.degenerate.assign(n, 0);

  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic, 256) if (par)
  for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
    auto i = static_cast<std::size_t>(ii);
    std::vector<Neighbor> nb = index.knn(cloud.positions[i], k);
    Vec3 mean{0, 0, 0};
    for (const Neighbor& p : nb) mean = mean + cloud.positions[p.index];
    mean = mean * (1.0 / static_cast<double>(nb.size()));
    detail::Sym3 cov;
    for (const Neighbor& p : nb) {
      Vec3 d = cloud.positions[p.index] - mean;
      cov.xx += d.x * d.x;
      cov.xy += d.x * d.y;
      cov.xz += d.x * d.z;
      cov.yy += d.y * d.y;
      cov.yz += d.y * d.z;
      cov.zz += d.z * d.z;
    }
    Vec3 normal;
    if (detail::sym3_min_eigenvector(cov, &normal)) {
      field.normals[i] = detail::hemisphere_normalize(normal);
    } else {
      field.normals[i] = {0, 0, 1};
      field.degenerate[i] = 1;
    }
  }
  return field;
}

}  // namespace floorgen
