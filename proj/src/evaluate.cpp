#include "floorgen/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "floorgen/error.hpp"

namespace floorgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_frames(const BitRaster& a, const BitRaster& b) {
  if (!(a.frame == b.frame))
    throw Error(ErrorKind::FrameMismatch, "rasters do not share a frame");
}

long long to_px(double v, double origin, double res) {
  return std::llround((v - origin) / res);
}

void draw_segment(BitRaster& r, const Vec2& a, const Vec2& b) {
  long long x0 = to_px(a.x, r.frame.origin.x, r.frame.resolution);
  long long y0 = to_px(a.y, r.frame.origin.y, r.frame.resolution);
  long long x1 = to_px(b.x, r.frame.origin.x, r.frame.resolution);
  long long y1 = to_px(b.y, r.frame.origin.y, r.frame.resolution);
  long long dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  long long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  long long err = dx + dy;
  auto w = static_cast<long long>(r.width());
  auto h = static_cast<long long>(r.height());
  for (;;) {
    if (x0 >= 0 && y0 >= 0 && x0 < w && y0 < h)
      r.set(static_cast<std::size_t>(x0), static_cast<std::size_t>(y0));
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

// 1D squared-distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z, int n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[0]] == kInf && k == 0) {
      v[0] = q;
      continue;
    }
    double s;
    for (;;) {
      int p = v[k];
      s = (f[q] + static_cast<double>(q) * q - f[p] - static_cast<double>(p) * p) /
          (2.0 * (q - p));
      if (s <= z[k]) --k;
      else break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (f[v[0]] == kInf) {
    std::fill(d.begin(), d.begin() + n, kInf);
    return;
  }
  int k2 = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k2 + 1] < static_cast<double>(q)) ++k2;
    double dq = static_cast<double>(q) - v[k2];
    d[q] = dq * dq + f[v[k2]];
  }
}

void grow_bounds(const Floorplan& fp, double& xlo, double& ylo, double& xhi, double& yhi) {
  auto grow = [&](const Vec2& p) {
    xlo = std::min(xlo, p.x);
    ylo = std::min(ylo, p.y);
    xhi = std::max(xhi, p.x);
    yhi = std::max(yhi, p.y);
  };
  for (const WallSegment2D& w : fp.walls) {
    grow(w.inner.a);
    grow(w.inner.b);
    grow(w.outer.a);
    grow(w.outer.b);
  }
  for (const DoorOpening& d : fp.doors) grow(d.center);
  for (const auto& run : fp.stairs)
    for (const Segment2& s : run) {
      grow(s.first);
      grow(s.second);
    }
  for (const auto& room : fp.rooms)
    for (const Vec2& p : room) grow(p);
}

}  // namespace

std::size_t BitRaster::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

RasterFrame shared_frame(const Floorplan& a, const Floorplan& b, double resolution,
                         double margin) {
  double xlo = kInf, ylo = kInf, xhi = -kInf, yhi = -kInf;
  grow_bounds(a, xlo, ylo, xhi, yhi);
  grow_bounds(b, xlo, ylo, xhi, yhi);
  RasterFrame frame;
  frame.resolution = resolution;
  if (xlo > xhi) {  // both plans empty
    frame.origin = {0, 0};
    return frame;
  }
  double pad = margin + 5.0 * resolution;
  frame.origin = {xlo - pad, ylo - pad};
  frame.width = static_cast<std::size_t>(std::ceil((xhi + pad - frame.origin.x) / resolution)) + 1;
  frame.height = static_cast<std::size_t>(std::ceil((yhi + pad - frame.origin.y) / resolution)) + 1;
  return frame;
}

BitRaster rasterize_lines(const Floorplan& fp, const RasterFrame& frame) {
  BitRaster r(frame);
  for (const WallSegment2D& w : fp.walls) {
    draw_segment(r, w.inner.a, w.inner.b);
    draw_segment(r, w.outer.a, w.outer.b);
  }
  for (const DoorOpening& d : fp.doors) {
    if (d.wall_id >= 0 && d.wall_id < static_cast<int>(fp.walls.size())) {
      const Line2D& inner = fp.walls[static_cast<std::size_t>(d.wall_id)].inner;
      draw_segment(r, inner.at(d.u_lo), inner.at(d.u_hi));
    }
  }
  for (const auto& run : fp.stairs)
    for (const Segment2& s : run) draw_segment(r, s.first, s.second);
  return r;
}

BitRaster rasterize_rooms(const std::vector<std::vector<Vec2>>& rooms,
                          const RasterFrame& frame) {
  BitRaster r(frame);
  std::vector<double> xs;
  for (const auto& poly : rooms) {
    if (poly.size() < 3) continue;
    double ylo = poly[0].y, yhi = poly[0].y;
    for (const Vec2& p : poly) {
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
    auto y0 = std::max(0LL, to_px(ylo, frame.origin.y, frame.resolution) - 1);
    auto y1 = std::min(static_cast<long long>(frame.height) - 1,
                       to_px(yhi, frame.origin.y, frame.resolution) + 1);
    for (long long y = y0; y <= y1; ++y) {
      double py = frame.origin.y + static_cast<double>(y) * frame.resolution;
      xs.clear();
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        if ((a.y <= py) == (b.y <= py)) continue;
        xs.push_back(a.x + (py - a.y) / (b.y - a.y) * (b.x - a.x));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
        auto x0 = std::max(0LL, static_cast<long long>(std::ceil(
                                    (xs[i] - frame.origin.x) / frame.resolution)));
        auto x1 = std::min(static_cast<long long>(frame.width) - 1,
                           static_cast<long long>(std::floor(
                               (xs[i + 1] - frame.origin.x) / frame.resolution)));
        for (long long x = x0; x <= x1; ++x)
          r.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      }
    }
  }
  return r;
}

std::vector<double> squared_edt(const BitRaster& raster, Exec exec) {
  const auto w = static_cast<int>(raster.width());
  const auto h = static_cast<int>(raster.height());
  std::vector<double> tmp(raster.bits.size());
  std::vector<double> out(raster.bits.size());

  const bool par = exec == Exec::Parallel;
#pragma omp parallel if (par)
  {
    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    std::vector<int> v(std::max(w, h));
    std::vector<double> z(static_cast<std::size_t>(std::max(w, h)) + 1);

#pragma omp for schedule(static)
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y)
        f[y] = raster.test(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) ? 0.0 : kInf;
      edt_1d(f, d, v, z, h);
      for (int y = 0; y < h; ++y) tmp[static_cast<std::size_t>(y) * w + x] = d[y];
    }

#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[x] = tmp[static_cast<std::size_t>(y) * w + x];
      edt_1d(f, d, v, z, w);
      for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(y) * w + x] = d[x];
    }
  }
  return out;
}

std::vector<MarginScore> precision_recall(const BitRaster& pred, const BitRaster& gt,
                                          const std::vector<double>& margins) {
  check_frames(pred, gt);
  const double res = pred.frame.resolution;
  const std::size_t n_pred = pred.count();
  const std::size_t n_gt = gt.count();

  std::vector<double> edt_gt, edt_pred;
  if (n_pred > 0 && n_gt > 0) {
    edt_gt = squared_edt(gt);
    edt_pred = squared_edt(pred);
  }

  std::vector<MarginScore> out;
  for (double margin : margins) {
    MarginScore ms;
    ms.margin = margin;
    const double thr2 = (margin / res) * (margin / res) + 1e-9;
    if (n_pred == 0) {
      ms.precision = n_gt == 0 ? 1.0 : 0.0;
    } else if (n_gt == 0) {
      ms.precision = 0.0;
    } else {
      std::size_t hit = 0;
      for (std::size_t i = 0; i < pred.bits.size(); ++i)
        if (pred.bits[i] && edt_gt[i] <= thr2) ++hit;
      ms.precision = static_cast<double>(hit) / static_cast<double>(n_pred);
    }
    if (n_gt == 0) {
      ms.recall = n_pred == 0 ? 1.0 : 0.0;
    } else if (n_pred == 0) {
      ms.recall = 0.0;
    } else {
      std::size_t hit = 0;
      for (std::size_t i = 0; i < gt.bits.size(); ++i)
        if (gt.bits[i] && edt_pred[i] <= thr2) ++hit;
      ms.recall = static_cast<double>(hit) / static_cast<double>(n_gt);
    }
    out.push_back(ms);
  }
  return out;
}

double room_iou(const std::vector<std::vector<Vec2>>& pred_rooms,
                const std::vector<std::vector<Vec2>>& gt_rooms, const RasterFrame& frame) {
  if (gt_rooms.empty()) return pred_rooms.empty() ? 1.0 : 0.0;
  if (pred_rooms.empty()) return 0.0;

  const std::size_t ng = gt_rooms.size(), np = pred_rooms.size();
  std::vector<std::vector<std::uint8_t>> gt_masks, pred_masks;
  gt_masks.reserve(ng);
  pred_masks.reserve(np);
  for (const auto& room : gt_rooms)
    gt_masks.push_back(rasterize_rooms({room}, frame).bits);
  for (const auto& room : pred_rooms)
    pred_masks.push_back(rasterize_rooms({room}, frame).bits);

  std::vector<double> gt_area(ng, 0), pred_area(np, 0);
  for (std::size_t g = 0; g < ng; ++g)
    gt_area[g] = static_cast<double>(std::count(gt_masks[g].begin(), gt_masks[g].end(), 1));
  for (std::size_t p = 0; p < np; ++p)
    pred_area[p] =
        static_cast<double>(std::count(pred_masks[p].begin(), pred_masks[p].end(), 1));

  struct Pair {
    double iou;
    std::size_t g, p;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t p = 0; p < np; ++p) {
      double inter = 0;
      for (std::size_t i = 0; i < gt_masks[g].size(); ++i)
        if (gt_masks[g][i] && pred_masks[p][i]) ++inter;
      double uni = gt_area[g] + pred_area[p] - inter;
      if (inter > 0 && uni > 0) pairs.push_back({inter / uni, g, p});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.g != b.g) return a.g < b.g;
    return a.p < b.p;
  });

  std::vector<char> g_used(ng, 0), p_used(np, 0);
  std::vector<double> g_iou(ng, 0.0);
  for (const Pair& pr : pairs) {
    if (g_used[pr.g] || p_used[pr.p]) continue;
    g_used[pr.g] = 1;
    p_used[pr.p] = 1;
    g_iou[pr.g] = pr.iou;
  }
  double total_area = std::accumulate(gt_area.begin(), gt_area.end(), 0.0);
  if (total_area <= 0.0) return 0.0;
  double score = 0.0;
  for (std::size_t g = 0; g < ng; ++g) score += gt_area[g] * g_iou[g];
  return score / total_area;
}

namespace {

std::size_t flood_count(const BitRaster& mask, bool value, bool eight_conn,
                        std::vector<std::uint8_t>& visited, bool enclosed_only) {
  const auto w = static_cast<long long>(mask.width());
  const auto h = static_cast<long long>(mask.height());
  std::fill(visited.begin(), visited.end(), 0);
  std::size_t components = 0;
  std::deque<std::pair<long long, long long>> queue;

  auto val = [&](long long x, long long y) {
    return mask.bits[static_cast<std::size_t>(y) * mask.width() + static_cast<std::size_t>(x)] != 0;
  };

  for (long long sy = 0; sy < h; ++sy)
    for (long long sx = 0; sx < w; ++sx) {
      std::size_t si = static_cast<std::size_t>(sy) * mask.width() + static_cast<std::size_t>(sx);
      if (visited[si] || val(sx, sy) != value) continue;
      bool touches_border = false;
      visited[si] = 1;
      queue.clear();
      queue.emplace_back(sx, sy);
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touches_border = true;
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight_conn && dx != 0 && dy != 0) continue;
            long long nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            std::size_t ni = static_cast<std::size_t>(ny) * mask.width() + static_cast<std::size_t>(nx);
            if (visited[ni] || val(nx, ny) != value) continue;
            visited[ni] = 1;
            queue.emplace_back(nx, ny);
          }
      }
      if (!enclosed_only || !touches_border) ++components;
    }
  return components;
}

}  // namespace

BettiNumbers betti_numbers(const BitRaster& mask) {
  std::vector<std::uint8_t> visited(mask.bits.size());
  BettiNumbers b;
  b.components = flood_count(mask, true, true, visited, false);
  b.holes = flood_count(mask, false, false, visited, true);
  return b;
}

double betti_error(const BitRaster& pred_mask, const BitRaster& gt_mask) {
  check_frames(pred_mask, gt_mask);
  BettiNumbers bp = betti_numbers(pred_mask);
  BettiNumbers bg = betti_numbers(gt_mask);
  auto diff = [](std::size_t a, std::size_t b) {
    return a > b ? static_cast<double>(a - b) : static_cast<double>(b - a);
  };
  return diff(bp.components, bg.components) + diff(bp.holes, bg.holes);
}

bool is_simple_point(const BitRaster& mask, std::size_t x, std::size_t y) {
  const auto w = static_cast<long long>(mask.width());
  const auto h = static_cast<long long>(mask.height());
  auto val = [&](long long px, long long py) {
    if (px < 0 || py < 0 || px >= w || py >= h) return false;
    return mask.bits[static_cast<std::size_t>(py) * mask.width() +
                     static_cast<std::size_t>(px)] != 0;
  };

  // Ring cells clockwise from the top-left corner.
  static constexpr int kDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  bool fg[8];
  for (int i = 0; i < 8; ++i)
    fg[i] = val(static_cast<long long>(x) + kDx[i], static_cast<long long>(y) + kDy[i]);

  auto count_components = [&](bool value, bool eight_conn, bool only_4_neighbors) {
    int parent[8];
    for (int i = 0; i < 8; ++i) parent[i] = i;
    auto find = [&](int i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (int i = 0; i < 8; ++i) {
      if (fg[i] != value) continue;
      for (int j = i + 1; j < 8; ++j) {
        if (fg[j] != value) continue;
        int adx = std::abs(kDx[i] - kDx[j]), ady = std::abs(kDy[i] - kDy[j]);
        bool adjacent = eight_conn ? (adx <= 1 && ady <= 1) : (adx + ady == 1);
        if (adjacent) {
          int a = find(i), b = find(j);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    int count = 0;
    for (int i = 0; i < 8; ++i) {
      if (fg[i] != value || find(i) != i) continue;
      if (only_4_neighbors) {
        // Count only components containing a 4-neighbor of the center.
        bool has4 = false;
        for (int j = 0; j < 8; ++j)
          if (fg[j] == value && find(j) == i && std::abs(kDx[j]) + std::abs(kDy[j]) == 1)
            has4 = true;
        if (!has4) continue;
      }
      ++count;
    }
    return count;
  };

  int c_fg = count_components(true, true, false);
  int c_bg = count_components(false, false, true);
  return c_fg == 1 && c_bg == 1;
}

double warping_error(const BitRaster& pred_mask, const BitRaster& gt_mask, int max_warp) {
  check_frames(pred_mask, gt_mask);
  BitRaster warped = gt_mask;
  const auto w = static_cast<long long>(warped.width());
  const auto h = static_cast<long long>(warped.height());

  auto val = [&](long long x, long long y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return false;
    return warped.bits[static_cast<std::size_t>(y) * warped.width() +
                       static_cast<std::size_t>(x)] != 0;
  };
  auto is_boundary = [&](long long x, long long y) {
    bool v = val(x, y);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (val(x + dx, y + dy) != v) return true;
      }
    return false;
  };

  for (int pass = 0; pass < max_warp; ++pass) {
    std::size_t flips = 0;
    for (long long y = 0; y < h; ++y)
      for (long long x = 0; x < w; ++x) {
        std::size_t i = static_cast<std::size_t>(y) * warped.width() + static_cast<std::size_t>(x);
        if (warped.bits[i] == pred_mask.bits[i]) continue;
        if (!is_boundary(x, y)) continue;
        if (!is_simple_point(warped, static_cast<std::size_t>(x), static_cast<std::size_t>(y)))
          continue;
        warped.bits[i] = pred_mask.bits[i];
        ++flips;
      }
    if (flips == 0) break;
  }

  std::size_t disagree = 0;
  for (std::size_t i = 0; i < warped.bits.size(); ++i)
    if (warped.bits[i] != pred_mask.bits[i]) ++disagree;
  return static_cast<double>(disagree) / static_cast<double>(warped.bits.size());
}

EvalReport evaluate_pair(const Floorplan& pred, const Floorplan& gt, const EvalConfig& config) {
  double max_margin = 0.0;
  for (double m : config.margins) max_margin = std::max(max_margin, m);
  RasterFrame frame = shared_frame(pred, gt, config.resolution, max_margin);

  EvalReport report;
  report.margins =
      precision_recall(rasterize_lines(pred, frame), rasterize_lines(gt, frame), config.margins);

  report.iou = room_iou(pred.rooms, gt.rooms, frame);
  BitRaster pred_rooms = rasterize_rooms(pred.rooms, frame);
  BitRaster gt_rooms = rasterize_rooms(gt.rooms, frame);
  report.betti_error = betti_error(pred_rooms, gt_rooms);
  report.warping_error = warping_error(pred_rooms, gt_rooms, config.max_warp);

  for (std::size_t i = 1; i < report.margins.size(); ++i) {
    if (config.margins[i] < config.margins[i - 1]) continue;
    if (report.margins[i].precision + 1e-12 < report.margins[i - 1].precision ||
        report.margins[i].recall + 1e-12 < report.margins[i - 1].recall)
      throw Error(ErrorKind::InvalidSpec, "margin monotonicity violated");
  }
  return report;
}

namespace {

std::string margin_key(double margin) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", margin);
  return buf;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::json j;
  for (const MarginScore& m : report.margins) {
    j["precision"][margin_key(m.margin)] = m.precision;
    j["recall"][margin_key(m.margin)] = m.recall;
  }
  j["iou"] = report.iou;
  j["warping_error"] = report.warping_error;
  j["betti_error"] = report.betti_error;
  return j.dump(2) + "\n";
}

std::string eval_report_row(const EvalReport& report) {
  std::string row;
  char buf[64];
  for (const MarginScore& m : report.margins) {
    std::snprintf(buf, sizeof buf, "Prec(%gm) %.2f%%  ", m.margin, 100.0 * m.precision);
    row += buf;
  }
  for (const MarginScore& m : report.margins) {
    std::snprintf(buf, sizeof buf, "Rec(%gm) %.2f%%  ", m.margin, 100.0 * m.recall);
    row += buf;
  }
  std::snprintf(buf, sizeof buf, "IoU %.2f%%  Warping %.3f  Betti %.3f",
                100.0 * report.iou, report.warping_error, report.betti_error);
  row += buf;
  return row;
}

}  // namespace floorgen
