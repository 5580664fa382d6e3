#pragma once

#include <vector>

#include "floorgen/exec.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/spatial_index.hpp"

namespace floorgen {

// Per-point unit normals, hemisphere-disambiguated: z >= 0, with ties (|z|
// within 1e-9) broken by y >= 0, then x >= 0. degenerate[i] marks points
// whose k-neighborhood had covariance rank < 2; their normal is the fixed
// fallback (0, 0, 1).
struct NormalField {
  std::vector<Vec3> normals;
  std::vector<char> degenerate;

  std::size_t size() const { return normals.size(); }
};

// Smallest-eigenvalue unit eigenvector of the neighborhood covariance,
// computed with a closed-form symmetric 3x3 eigensolver. Deterministic and
// independent of thread count: each point depends only on its own
// neighborhood.
NormalField estimate_normals(const LabeledPointCloud& cloud, const SpatialIndex& index,
                             std::size_t k, Exec exec = Exec::Parallel);

namespace detail {

// Symmetric 3x3 eigensolve helpers, exposed for the unit tests.
struct Sym3 {
  double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
};

// Eigenvalues ascending.
void sym3_eigenvalues(const Sym3& m, double out[3]);

// Unit eigenvector for the smallest eigenvalue; returns false when the
// matrix has rank < 2 (direction not unique).
bool sym3_min_eigenvector(const Sym3& m, Vec3* out);

Vec3 hemisphere_normalize(Vec3 n);

}  // namespace detail

}  // namespace floorgen
