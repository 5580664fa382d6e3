#include "floorgen/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "floorgen/error.hpp"

namespace floorgen {

namespace {

inline double dist2(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double coord(const Vec3& p, int axis) {
  return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
}

}  // namespace

SpatialIndex::SpatialIndex(const LabeledPointCloud& cloud) : points_(cloud.positions) {
  if (points_.empty()) throw Error(ErrorKind::EmptyCloud, "cannot index an empty cloud");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, points_.size());
}

int SpatialIndex::build(std::size_t begin, std::size_t end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    const Vec3& p = points_[order_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  Vec3 extent = hi - lo;
  int axis = 0;
  if (extent.y > coord(extent, axis)) axis = 1;
  if (extent.z > coord(extent, axis)) axis = 2;

  std::size_t mid = begin + (end - begin) / 2;
  // Tie-break on index so the build is a pure function of the input cloud.
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     double ca = coord(points_[a], axis), cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  node.axis = axis;
  node.split = coord(points_[order_[mid]], axis);
  nodes_.push_back(node);
  int id = static_cast<int>(nodes_.size() - 1);
  int left = build(begin, mid);
  int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> SpatialIndex::knn(const Vec3& query, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;  // max at top = current worst

  auto consider = [&](std::size_t idx) {
    Entry e{dist2(points_[idx], query), idx};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  };

  // Iterative DFS, nearer child first.
  std::vector<int> stack{root_};
  std::vector<double> gap{0.0};  // squared distance to the node's half-space
  while (!stack.empty()) {
    int id = stack.back();
    double g = gap.back();
    stack.pop_back();
    gap.pop_back();
    // Equal distances must still be visited: an index tie-break may win.
    if (heap.size() == k && g > heap.top().first) continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) consider(order_[i]);
      continue;
    }
    double d = coord(query, n.axis) - n.split;
    int near = d < 0.0 ? n.left : n.right;
    int far = d < 0.0 ? n.right : n.left;
    stack.push_back(far);
    gap.push_back(std::max(g, d * d));
    stack.push_back(near);
    gap.push_back(g);
  }

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = {heap.top().second, heap.top().first};
    heap.pop();
  }
  return out;
}

template <typename Visit>
void SpatialIndex::walk_radius(int id, const Vec3& q, double r2, const Visit& visit) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      std::size_t idx = order_[i];
      if (dist2(points_[idx], q) <= r2) visit(idx);
    }
    return;
  }
  double d = coord(q, n.axis) - n.split;
  if (d < 0.0) {
    walk_radius(n.left, q, r2, visit);
    if (d * d <= r2) walk_radius(n.right, q, r2, visit);
  } else {
    walk_radius(n.right, q, r2, visit);
    if (d * d <= r2) walk_radius(n.left, q, r2, visit);
  }
}

std::vector<std::size_t> SpatialIndex::radius(const Vec3& query, double r) const {
  std::vector<std::size_t> out;
  walk_radius(root_, query, r * r, [&](std::size_t idx) { out.push_back(idx); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SpatialIndex::radius_masked(const Vec3& query, double r,
                                                     const std::vector<char>& mask) const {
  std::vector<std::size_t> out;
  walk_radius(root_, query, r * r, [&](std::size_t idx) {
    if (mask[idx]) out.push_back(idx);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace floorgen
