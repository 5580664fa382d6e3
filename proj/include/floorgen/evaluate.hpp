#pragma once

#include <string>
#include <vector>

#include "floorgen/exec.hpp"
#include "floorgen/floorplan.hpp"

namespace floorgen {

// Shared pixel lattice for comparing two plans: pixel (x, y) sits at
// origin + (x * resolution, y * resolution).
struct RasterFrame {
  Vec2 origin{0, 0};
  double resolution = 0.01;
  std::size_t width = 1;
  std::size_t height = 1;

  bool operator==(const RasterFrame& o) const {
    return origin == o.origin && resolution == o.resolution && width == o.width &&
           height == o.height;
  }
};

struct BitRaster {
  RasterFrame frame;
  std::vector<std::uint8_t> bits;

  explicit BitRaster(const RasterFrame& f = {})
      : frame(f), bits(f.width * f.height, 0) {}

  std::size_t width() const { return frame.width; }
  std::size_t height() const { return frame.height; }
  bool test(std::size_t x, std::size_t y) const { return bits[y * frame.width + x] != 0; }
  void set(std::size_t x, std::size_t y) { bits[y * frame.width + x] = 1; }
  std::size_t count() const;
};

RasterFrame shared_frame(const Floorplan& a, const Floorplan& b, double resolution,
                         double margin);

// Draws every wall fold segment, door closure segment, and stair line as a
// 1-pixel Bresenham stroke.
BitRaster rasterize_lines(const Floorplan& fp, const RasterFrame& frame);

// Filled union of room polygons (pixel-center sampling).
BitRaster rasterize_rooms(const std::vector<std::vector<Vec2>>& rooms,
                          const RasterFrame& frame);

// Exact squared Euclidean distance (in pixels^2) to the nearest set pixel;
// unset-free rasters give +inf everywhere. Two-pass lower-envelope transform,
// parallel by row/column with bit-stable output.
std::vector<double> squared_edt(const BitRaster& raster, Exec exec = Exec::Parallel);

struct MarginScore {
  double margin = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

std::vector<MarginScore> precision_recall(const BitRaster& pred, const BitRaster& gt,
                                          const std::vector<double>& margins);

// Greedy room matching by descending pairwise IoU; area-weighted mean over
// ground-truth rooms, unmatched rooms scoring zero.
double room_iou(const std::vector<std::vector<Vec2>>& pred_rooms,
                const std::vector<std::vector<Vec2>>& gt_rooms, const RasterFrame& frame);

struct BettiNumbers {
  std::size_t components = 0;  // b0: 8-connected foreground
  std::size_t holes = 0;       // b1: enclosed 4-connected background
};

BettiNumbers betti_numbers(const BitRaster& mask);

double betti_error(const BitRaster& pred_mask, const BitRaster& gt_mask);

// Topology-preserving greedy warp of gt toward pred: boundary pixels that
// are simple points flip when that reduces disagreement, for up to max_warp
// passes; the residual Hamming disagreement fraction is the error.
double warping_error(const BitRaster& pred_mask, const BitRaster& gt_mask, int max_warp);

// (8, 4) digital-topology simple-point test, exposed for the property tests.
bool is_simple_point(const BitRaster& mask, std::size_t x, std::size_t y);

struct EvalConfig {
  double resolution = 0.01;
  std::vector<double> margins{0.02, 0.05, 0.10};
  int max_warp = 16;
};

struct EvalReport {
  std::vector<MarginScore> margins;
  double iou = 0.0;
  double warping_error = 0.0;
  double betti_error = 0.0;
};

EvalReport evaluate_pair(const Floorplan& pred, const Floorplan& gt,
                         const EvalConfig& config = {});

std::string eval_report_to_json(const EvalReport& report);

// One Table-style row: precision/recall per margin as percentages, IoU,
// warping error, Betti error.
std::string eval_report_row(const EvalReport& report);

}  // namespace floorgen
