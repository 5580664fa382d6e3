#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floorgen/annotate.hpp"
#include "floorgen/door_detect.hpp"
#include "floorgen/evaluate.hpp"
#include "floorgen/floorplan.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/preprocess.hpp"
#include "floorgen/stair_detect.hpp"

namespace floorgen {

// Every tunable of the pipeline in one place; serialized as the JSON config
// file with strict schema validation (unknown keys rejected, ranges checked).
struct PipelineConfig {
  std::uint64_t seed = 42;
  std::size_t normal_k = 16;

  bool outlier_enabled = true;
  std::size_t outlier_k = 8;
  double outlier_std_ratio = 2.0;

  NormalizeParams normalize;

  double level_bin_size = 0.05;
  double level_prominence = 0.3;
  double level_min_story = 1.5;

  AnnotationParams annotation;

  double wall_vertical_tolerance = deg2rad(10.0);
  double wall_angle_thresh = deg2rad(15.0);
  double wall_radius = 0.15;
  std::size_t wall_min_cluster = 100;
  std::size_t wall_min_points = 500;
  double wall_min_height_fraction = 0.5;

  double door_cell = 0.05;
  double door_min_clear_height = 1.8;
  DoorBounds door_bounds;

  StairParams stairs;
  TwoFoldParams ransac;
  AssembleParams assemble;
  EvalConfig eval;

  std::optional<std::pair<double, double>> crop_z;  // per-story crop for multi-story scans
};

std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);

struct StageInfo {
  std::string name;
  std::size_t count = 0;  // points (or instances) leaving the stage
  double millis = 0.0;
};

struct PipelineResult {
  Floorplan plan;
  RigidTransform to_original;  // normalized frame -> input frame
  std::vector<StageInfo> stages;
  bool used_level_fallback = false;
  std::size_t degenerate_walls = 0;

  std::string report_text() const;
};

enum class LabelSource { None, File, Drawing };

// Full run on an in-memory cloud. The cloud's own labels are used when
// source == File (pre-attached); a drawing triggers pseudo-annotation; None
// runs the geometric-only path where every point is a wall candidate.
PipelineResult run_pipeline(LabeledPointCloud cloud, LabelSource source,
                            const DrawingSet* drawing, const PipelineConfig& config);

// File-level entry point used by the CLI: loads the cloud, attaches labels
// from labels_path or pseudo-annotates from drawing_path (at most one).
PipelineResult run_pipeline_files(const std::string& cloud_path, const std::string& labels_path,
                                  const std::string& drawing_path,
                                  const PipelineConfig& config);

struct GridSearchOptions {
  bool use_labels = true;
  double score_margin = 0.10;
};

struct GridPointResult {
  std::vector<std::pair<std::string, double>> assignment;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_iou = 0.0;
  double score = 0.0;
};

struct GridSearchResult {
  std::vector<GridPointResult> table;
  std::size_t best_index = 0;
  PipelineConfig best_config;

  std::string table_csv() const;
};

// Corpus fixture on disk: <name>.cloud.ply / <name>.labels.txt / <name>.gt.json.
struct CorpusEntry {
  std::string name;
  std::string cloud_path;
  std::string labels_path;  // empty when absent
  std::string gt_path;
};

std::vector<CorpusEntry> discover_corpus(const std::string& dir);

// Exhaustive grid over dotted config paths (e.g. "walls.min_height_fraction":
// [0, 0.5]); score = mean precision + mean recall at score_margin + mean room
// IoU over the corpus, fixtures that fail scoring 0. Ties keep the
// lexicographically first grid point.
GridSearchResult grid_search(const std::vector<CorpusEntry>& corpus,
                             const std::string& grid_json, const PipelineConfig& base,
                             const GridSearchOptions& options = {});

}  // namespace floorgen
