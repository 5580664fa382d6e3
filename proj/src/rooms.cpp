#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "floorgen/error.hpp"
#include "floorgen/floorplan.hpp"

namespace floorgen {

namespace {

struct Grid {
  std::size_t w = 0, h = 0;
  double res = 0.02;
  Vec2 origin{0, 0};
  std::vector<std::uint8_t> cells;

  std::uint8_t& at(std::size_t x, std::size_t y) { return cells[y * w + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return cells[y * w + x]; }
  Vec2 center(std::size_t x, std::size_t y) const {
    return {origin.x + (static_cast<double>(x) + 0.5) * res,
            origin.y + (static_cast<double>(y) + 0.5) * res};
  }
};

// Even-odd scanline fill sampling pixel centers.
void fill_polygon(Grid& g, const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return;
  double ylo = poly[0].y, yhi = poly[0].y;
  for (const Vec2& p : poly) {
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  auto y_begin = static_cast<long long>(std::floor((ylo - g.origin.y) / g.res - 0.5));
  auto y_end = static_cast<long long>(std::ceil((yhi - g.origin.y) / g.res));
  y_begin = std::max(y_begin, 0LL);
  y_end = std::min(y_end, static_cast<long long>(g.h) - 1);

  std::vector<double> xs;
  for (long long y = y_begin; y <= y_end; ++y) {
    double py = g.origin.y + (static_cast<double>(y) + 0.5) * g.res;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      if ((a.y <= py) == (b.y <= py)) continue;
      xs.push_back(a.x + (py - a.y) / (b.y - a.y) * (b.x - a.x));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      auto x0 = static_cast<long long>(std::ceil((xs[i] - g.origin.x) / g.res - 0.5));
      auto x1 = static_cast<long long>(std::floor((xs[i + 1] - g.origin.x) / g.res - 0.5));
      x0 = std::max(x0, 0LL);
      x1 = std::min(x1, static_cast<long long>(g.w) - 1);
      for (long long x = x0; x <= x1; ++x) g.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 1;
    }
  }
}

// 1-pixel stroke so bands thinner than a pixel still block the flood fill.
void stroke_segment(Grid& g, const Vec2& a, const Vec2& b) {
  auto px = [&](const Vec2& p) {
    return std::pair<long long, long long>{
        std::llround((p.x - g.origin.x) / g.res - 0.5),
        std::llround((p.y - g.origin.y) / g.res - 0.5)};
  };
  auto [x0, y0] = px(a);
  auto [x1, y1] = px(b);
  long long dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  long long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  long long err = dx + dy;
  for (;;) {
    if (x0 >= 0 && y0 >= 0 && x0 < static_cast<long long>(g.w) && y0 < static_cast<long long>(g.h))
      g.at(static_cast<std::size_t>(x0), static_cast<std::size_t>(y0)) = 1;
    if (x0 == x1 && y0 == y1) break;
    long long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::vector<Vec2> wall_band(const WallSegment2D& w) {
  // Orient the quad so it stays simple even if the folds run antiparallel.
  if (dot(w.inner.b - w.inner.a, w.outer.b - w.outer.a) >= 0.0)
    return {w.inner.a, w.inner.b, w.outer.b, w.outer.a};
  return {w.inner.a, w.inner.b, w.outer.a, w.outer.b};
}

// Traces the outer boundary of a 4-connected pixel component as a CCW
// rectilinear polygon along pixel edges, collapsing collinear runs.
std::vector<Vec2> trace_outline(const Grid& g, const std::vector<std::size_t>& pixels,
                                const std::vector<std::uint8_t>& member) {
  using V = std::pair<long long, long long>;
  std::map<V, std::vector<V>> edges;  // start vertex -> list of end vertices

  auto in_region = [&](long long x, long long y) {
    if (x < 0 || y < 0 || x >= static_cast<long long>(g.w) || y >= static_cast<long long>(g.h))
      return false;
    return member[static_cast<std::size_t>(y) * g.w + static_cast<std::size_t>(x)] != 0;
  };

  for (std::size_t pix : pixels) {
    long long x = static_cast<long long>(pix % g.w);
    long long y = static_cast<long long>(pix / g.w);
    if (!in_region(x, y - 1)) edges[{x, y}].push_back({x + 1, y});
    if (!in_region(x + 1, y)) edges[{x + 1, y}].push_back({x + 1, y + 1});
    if (!in_region(x, y + 1)) edges[{x + 1, y + 1}].push_back({x, y + 1});
    if (!in_region(x - 1, y)) edges[{x, y + 1}].push_back({x, y});
  }
  if (edges.empty()) return {};

  const V start = edges.begin()->first;  // lexicographically smallest: on the outer loop
  std::vector<V> loop{start};
  V cur = start;
  V dir_in{0, 0};
  do {
    auto it = edges.find(cur);
    if (it == edges.end() || it->second.empty()) break;  // defensive; loops always close
    std::vector<V>& outs = it->second;
    std::size_t pick = 0;
    if (outs.size() > 1 && (dir_in.first != 0 || dir_in.second != 0)) {
      // Prefer the left turn to keep pinch points consistent.
      V left{-dir_in.second, dir_in.first};
      for (std::size_t i = 0; i < outs.size(); ++i) {
        V d{outs[i].first - cur.first, outs[i].second - cur.second};
        if (d == left) {
          pick = i;
          break;
        }
      }
    }
    V next = outs[pick];
    outs.erase(outs.begin() + static_cast<std::ptrdiff_t>(pick));
    dir_in = {next.first - cur.first, next.second - cur.second};
    loop.push_back(next);
    cur = next;
  } while (cur != start);
  if (loop.size() < 4) return {};
  loop.pop_back();  // drop the repeated start vertex

  std::vector<Vec2> poly;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const V& prev = loop[(i + m - 1) % m];
    const V& here = loop[i];
    const V& next = loop[(i + 1) % m];
    long long dx1 = here.first - prev.first, dy1 = here.second - prev.second;
    long long dx2 = next.first - here.first, dy2 = next.second - here.second;
    if (dx1 * dy2 - dy1 * dx2 == 0) continue;  // collinear
    poly.push_back({g.origin.x + static_cast<double>(here.first) * g.res,
                    g.origin.y + static_cast<double>(here.second) * g.res});
  }
  return poly;
}

}  // namespace

std::vector<std::vector<Vec2>> segment_rooms(const Floorplan& fp, double resolution,
                                             double min_room_area) {
  if (fp.walls.empty()) return {};

  double xlo = std::numeric_limits<double>::infinity(), ylo = xlo;
  double xhi = -xlo, yhi = -ylo;
  auto grow = [&](const Vec2& p) {
    xlo = std::min(xlo, p.x);
    ylo = std::min(ylo, p.y);
    xhi = std::max(xhi, p.x);
    yhi = std::max(yhi, p.y);
  };
  for (const WallSegment2D& w : fp.walls) {
    for (const Vec2& p : wall_band(w)) grow(p);
  }
  double margin = 0.2 + 2.0 * resolution;
  xlo -= margin;
  ylo -= margin;
  xhi += margin;
  yhi += margin;

  Grid blocked;
  blocked.res = resolution;
  blocked.origin = {xlo, ylo};
  blocked.w = static_cast<std::size_t>(std::ceil((xhi - xlo) / resolution)) + 1;
  blocked.h = static_cast<std::size_t>(std::ceil((yhi - ylo) / resolution)) + 1;
  if (blocked.w * blocked.h > 400'000'000)
    throw Error(ErrorKind::InvalidSpec, "room raster too large; increase resolution");
  blocked.cells.assign(blocked.w * blocked.h, 0);

  for (const WallSegment2D& w : fp.walls) {
    std::vector<Vec2> band = wall_band(w);
    fill_polygon(blocked, band);
    stroke_segment(blocked, band[0], band[1]);
    stroke_segment(blocked, band[1], band[2]);
    stroke_segment(blocked, band[2], band[3]);
    stroke_segment(blocked, band[3], band[0]);
  }
  // Doors close their openings so rooms split at doorways.
  for (const DoorOpening& d : fp.doors) {
    if (d.wall_id < 0 || d.wall_id >= static_cast<int>(fp.walls.size())) continue;
    const WallSegment2D& w = fp.walls[static_cast<std::size_t>(d.wall_id)];
    Vec2 n = perp(w.inner.dir());
    double depth = dot(w.outer.a - w.inner.a, n);
    Vec2 a = w.inner.at(d.u_lo), b = w.inner.at(d.u_hi);
    std::vector<Vec2> band{a, b, b + n * depth, a + n * depth};
    fill_polygon(blocked, band);
    stroke_segment(blocked, a, b);
    stroke_segment(blocked, b, band[2]);
    stroke_segment(blocked, band[2], band[3]);
    stroke_segment(blocked, band[3], a);
  }

  // Flood the outside from the raster border; rooms are what remains.
  std::vector<std::uint8_t> visited(blocked.w * blocked.h, 0);
  std::deque<std::size_t> queue;
  auto push = [&](std::size_t x, std::size_t y) {
    std::size_t i = y * blocked.w + x;
    if (!visited[i] && !blocked.cells[i]) {
      visited[i] = 1;
      queue.push_back(i);
    }
  };
  for (std::size_t x = 0; x < blocked.w; ++x) {
    push(x, 0);
    push(x, blocked.h - 1);
  }
  for (std::size_t y = 0; y < blocked.h; ++y) {
    push(0, y);
    push(blocked.w - 1, y);
  }
  auto flood = [&]() {
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      std::size_t x = i % blocked.w, y = i / blocked.w;
      if (x > 0) push(x - 1, y);
      if (x + 1 < blocked.w) push(x + 1, y);
      if (y > 0) push(x, y - 1);
      if (y + 1 < blocked.h) push(x, y + 1);
    }
  };
  flood();

  std::vector<std::vector<Vec2>> rooms;
  std::vector<std::uint8_t> member(blocked.w * blocked.h, 0);
  for (std::size_t start = 0; start < blocked.cells.size(); ++start) {
    if (visited[start] || blocked.cells[start]) continue;
    std::vector<std::size_t> pixels;
    visited[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      pixels.push_back(i);
      std::size_t x = i % blocked.w, y = i / blocked.w;
      if (x > 0) push(x - 1, y);
      if (x + 1 < blocked.w) push(x + 1, y);
      if (y > 0) push(x, y - 1);
      if (y + 1 < blocked.h) push(x, y + 1);
    }
    double area = static_cast<double>(pixels.size()) * resolution * resolution;
    if (area < min_room_area) continue;
    for (std::size_t i : pixels) member[i] = 1;
    std::vector<Vec2> poly = trace_outline(blocked, pixels, member);
    for (std::size_t i : pixels) member[i] = 0;
    if (poly.size() >= 3) rooms.push_back(std::move(poly));
  }
  return rooms;
}

}  // namespace floorgen
