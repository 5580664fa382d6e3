#pragma once

#include <cstddef>
#include <vector>

#include "floorgen/point_cloud.hpp"

namespace floorgen {

struct Neighbor {
  std::size_t index;
  double dist2;
};

// kd-tree over point positions. Queries are contractually equal to a
// brute-force scan: radius results are the full set with d^2 <= r^2 (indices
// ascending), kNN results are the k smallest (d^2, index) pairs ascending.
// The structure is immutable after construction and safe for concurrent
// queries.
class SpatialIndex {
 public:
  explicit SpatialIndex(const LabeledPointCloud& cloud);

  std::size_t size() const { return points_.size(); }

  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;
  std::vector<std::size_t> radius(const Vec3& query, double r) const;

  // radius() restricted to an arbitrary subset, via a caller-provided mask.
  std::vector<std::size_t> radius_masked(const Vec3& query, double r,
                                         const std::vector<char>& mask) const;

 private:
  struct Node {
    double split = 0.0;
    int axis = -1;           // -1 marks a leaf
    std::size_t begin = 0;   // leaf: range into order_
    std::size_t end = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);

  template <typename Visit>
  void walk_radius(int node, const Vec3& q, double r2, const Visit& visit) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr std::size_t kLeafSize = 16;
};

}  // namespace floorgen
