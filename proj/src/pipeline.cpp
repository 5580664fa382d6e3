#include "floorgen/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "floorgen/error.hpp"
#include "floorgen/normals.hpp"
#include "floorgen/rng.hpp"
#include "floorgen/spatial_index.hpp"
#include "floorgen/wall_seg.hpp"

namespace floorgen {

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageInfo>& stages) : stages_(stages) {}

  template <typename Fn>
  auto run(const std::string& name, std::size_t* count_out, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto result = fn();
      record(name, count_out, t0);
      return result;
    } catch (const Error& e) {
      throw Error(e.kind(), "stage " + name + ": " + e.what());
    }
  }

  void record(const std::string& name, std::size_t* count_out,
              std::chrono::steady_clock::time_point t0) {
    StageInfo info;
    info.name = name;
    info.count = count_out ? *count_out : 0;
    info.millis = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    stages_.push_back(info);
  }

 private:
  std::vector<StageInfo>& stages_;
};

}  // namespace

std::string PipelineResult::report_text() const {
  std::ostringstream out;
  out << "stage                 count        ms\n";
  char buf[96];
  for (const StageInfo& s : stages) {
    std::snprintf(buf, sizeof buf, "%-18s %10zu %9.1f\n", s.name.c_str(), s.count, s.millis);
    out << buf;
  }
  if (used_level_fallback) out << "levels: percentile fallback (no slab peaks)\n";
  if (degenerate_walls > 0)
    out << "ransac: " << degenerate_walls << " degenerate wall(s) skipped\n";
  return out.str();
}

PipelineResult run_pipeline(LabeledPointCloud cloud, LabelSource source,
                            const DrawingSet* drawing, const PipelineConfig& config) {
  PipelineResult result;
  StageClock clock(result.stages);
  std::size_t count = cloud.size();

  if (source == LabelSource::Drawing && drawing == nullptr)
    throw Error(ErrorKind::InvalidConfig, "drawing label source without a drawing");
  if (source != LabelSource::File) cloud.labels.reset();

  if (config.crop_z) {
    cloud = clock.run("crop", &count, [&] {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        double z = cloud.positions[i].z;
        if (z >= config.crop_z->first && z <= config.crop_z->second) keep.push_back(i);
      }
      LabeledPointCloud cropped = cloud.select(keep);
      count = cropped.size();
      return cropped;
    });
  }
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "stage load: no points to process");

  cloud = clock.run("normalize", &count, [&] {
    auto [normalized, tf] = normalize_coordinates(cloud, config.normalize);
    result.to_original = tf;
    count = normalized.size();
    return std::move(normalized);
  });

  if (config.outlier_enabled && cloud.size() > config.outlier_k) {
    cloud = clock.run("outliers", &count, [&] {
      SpatialIndex index(cloud);
      LabeledPointCloud filtered = remove_statistical_outliers(
          cloud, index, config.outlier_k, config.outlier_std_ratio);
      count = filtered.size();
      return filtered;
    });
  }

  FloorCeilingLevels levels = clock.run("levels", &count, [&] {
    ZHistogram hist = compute_z_histogram(cloud, config.level_bin_size);
    try {
      return detect_floor_ceiling(hist, config.level_prominence, config.level_min_story);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoPeaksFound) throw;
      result.used_level_fallback = true;
      return fallback_levels(cloud, config.level_bin_size, config.level_min_story);
    }
  });

  if (source == LabelSource::Drawing) {
    cloud = clock.run("annotate", &count, [&] {
      return annotate_from_drawing(cloud, *drawing, levels, config.annotation);
    });
  }

  SpatialIndex index = clock.run("index", &count, [&] { return SpatialIndex(cloud); });
  NormalField normals = clock.run("normals", &count, [&] {
    return estimate_normals(cloud, index, std::min(config.normal_k, cloud.size()));
  });

  const bool use_labels = cloud.has_labels();
  std::vector<std::size_t> candidates;
  clock.run("candidates", &count, [&] {
    candidates = filter_wall_candidates(cloud, normals, config.wall_vertical_tolerance,
                                        use_labels);
    count = candidates.size();
    return 0;
  });

  std::vector<WallInstance> walls;
  clock.run("wall_seg", &count, [&] {
    auto clusters = region_grow(candidates, cloud, index, normals, config.wall_angle_thresh,
                                config.wall_radius, config.wall_min_cluster);
    walls = parametric_filter_walls(clusters, cloud, levels, config.wall_min_points,
                                    config.wall_min_height_fraction);
    count = walls.size();
    return 0;
  });

  std::vector<DoorOpening> doors;
  clock.run("doors", &count, [&] {
    doors = detect_doors(walls, cloud, levels, config.door_cell, config.door_min_clear_height,
                         config.door_bounds);
    count = doors.size();
    return 0;
  });

  std::vector<StairRun> stair_runs;
  clock.run("stairs", &count, [&] {
    StairPatches patches =
        detect_stair_patches(cloud, index, normals, levels, config.stairs, use_labels);
    stair_runs = chain_steps(patches, config.stairs);
    count = stair_runs.size();
    return 0;
  });

  std::vector<WallSegment2D> walls2d;
  clock.run("ransac", &count, [&] {
    Vec2 interior{0, 0};
    std::size_t interior_n = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (use_labels && (*cloud.labels)[i] == SemanticClass::Wall) continue;
      interior = interior + cloud.positions[i].xy();
      ++interior_n;
    }
    bool has_hint = interior_n > 0;
    if (has_hint) interior = interior * (1.0 / static_cast<double>(interior_n));

    std::vector<WallSegment2D> results(walls.size());
    std::vector<char> ok(walls.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(walls.size()); ++i) {
      auto w = static_cast<std::size_t>(i);
      try {
        results[w] = fit_two_fold_ransac(walls[w], cloud, config.ransac,
                                         derive_stream(config.seed, w), interior, has_hint);
        results[w].wall_id = static_cast<int>(w);
        ok[w] = 1;
      } catch (const Error&) {
        ok[w] = 0;  // degenerate wall: dropped, counted below
      }
    }
    std::map<int, int> remap;
    for (std::size_t w = 0; w < walls.size(); ++w) {
      if (!ok[w]) {
        ++result.degenerate_walls;
        continue;
      }
      remap[static_cast<int>(w)] = static_cast<int>(walls2d.size());
      WallSegment2D seg = results[w];
      seg.wall_id = static_cast<int>(walls2d.size());
      walls2d.push_back(seg);
    }
    for (DoorOpening& d : doors) {
      auto it = remap.find(d.wall_id);
      d.wall_id = it == remap.end() ? -1 : it->second;
    }
    doors.erase(std::remove_if(doors.begin(), doors.end(),
                               [](const DoorOpening& d) { return d.wall_id < 0; }),
                doors.end());
    count = walls2d.size();
    return 0;
  });

  clock.run("assemble", &count, [&] {
    result.plan = assemble_floorplan(std::move(walls2d), std::move(doors), stair_runs,
                                     config.assemble);
    count = result.plan.rooms.size();
    return 0;
  });

  return result;
}

PipelineResult run_pipeline_files(const std::string& cloud_path, const std::string& labels_path,
                                  const std::string& drawing_path,
                                  const PipelineConfig& config) {
  if (!labels_path.empty() && !drawing_path.empty())
    throw Error(ErrorKind::InvalidConfig, "give at most one of labels and drawing");

  PipelineResult result;
  {
    StageClock clock(result.stages);
    std::size_t count = 0;
    LabeledPointCloud cloud = clock.run("load", &count, [&] {
      LabeledPointCloud c = load_point_cloud(cloud_path);
      if (!labels_path.empty()) c = load_labels(c, labels_path);
      count = c.size();
      return c;
    });
    DrawingSet drawing;
    LabelSource source = LabelSource::None;
    if (!labels_path.empty()) {
      source = LabelSource::File;
    } else if (!drawing_path.empty()) {
      drawing = load_drawing(drawing_path);
      source = LabelSource::Drawing;
    }
    PipelineResult rest = run_pipeline(std::move(cloud), source,
                                       source == LabelSource::Drawing ? &drawing : nullptr,
                                       config);
    rest.stages.insert(rest.stages.begin(), result.stages.begin(), result.stages.end());
    return rest;
  }
}

std::vector<CorpusEntry> discover_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw Error(ErrorKind::FileNotFound, dir + " is not a directory");
  std::vector<CorpusEntry> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    const std::string suffix = ".gt.json";
    if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix)
      continue;
    CorpusEntry ce;
    ce.name = name.substr(0, name.size() - suffix.size());
    ce.gt_path = entry.path().string();
    std::string base = (fs::path(dir) / ce.name).string();
    for (const char* ext : {".cloud.ply", ".cloud.xyz"})
      if (fs::exists(base + ext)) ce.cloud_path = base + ext;
    if (fs::exists(base + ".labels.txt")) ce.labels_path = base + ".labels.txt";
    if (!ce.cloud_path.empty()) out.push_back(std::move(ce));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
  return out;
}

namespace {

double margin_value(const EvalReport& report, double margin, bool recall) {
  for (const MarginScore& m : report.margins)
    if (std::abs(m.margin - margin) < 1e-9) return recall ? m.recall : m.precision;
  if (report.margins.empty()) return 0.0;
  return recall ? report.margins.back().recall : report.margins.back().precision;
}

}  // namespace

std::string GridSearchResult::table_csv() const {
  std::ostringstream out;
  if (table.empty()) return "";
  for (const auto& [key, value] : table.front().assignment) out << key << ',';
  out << "mean_precision,mean_recall,mean_iou,score\n";
  out.precision(6);
  for (const GridPointResult& row : table) {
    for (const auto& [key, value] : row.assignment) out << value << ',';
    out << row.mean_precision << ',' << row.mean_recall << ',' << row.mean_iou << ','
        << row.score << '\n';
  }
  return out.str();
}

GridSearchResult grid_search(const std::vector<CorpusEntry>& corpus,
                             const std::string& grid_json, const PipelineConfig& base,
                             const GridSearchOptions& options) {
  nlohmann::json grid;
  try {
    grid = nlohmann::json::parse(grid_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("grid JSON: ") + e.what());
  }
  if (!grid.is_object() || grid.empty())
    throw Error(ErrorKind::InvalidConfig, "grid must be a non-empty object of path -> values");

  std::vector<std::string> keys;
  std::vector<std::vector<nlohmann::json>> values;
  for (const auto& [key, list] : grid.items()) {
    if (!list.is_array() || list.empty())
      throw Error(ErrorKind::InvalidConfig, "grid entry '" + key + "' must be a value list");
    keys.push_back(key);
    values.emplace_back(list.begin(), list.end());
  }

  // Config instantiation via JSON pointer on the serialized base config.
  nlohmann::json base_json = nlohmann::json::parse(config_to_json(base));
  auto instantiate = [&](const std::vector<std::size_t>& pick) {
    nlohmann::json j = base_json;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      std::string pointer = "/" + keys[k];
      std::replace(pointer.begin(), pointer.end(), '.', '/');
      j[nlohmann::json::json_pointer(pointer)] = values[k][pick[k]];
    }
    return config_from_json(j.dump());
  };

  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();

  GridSearchResult result;
  double best_score = -1.0;
  std::vector<std::size_t> pick(keys.size(), 0);
  for (std::size_t g = 0; g < total; ++g) {
    PipelineConfig cfg = instantiate(pick);
    GridPointResult row;
    for (std::size_t k = 0; k < keys.size(); ++k)
      row.assignment.emplace_back(keys[k], values[k][pick[k]].is_boolean()
                                               ? (values[k][pick[k]].get<bool>() ? 1.0 : 0.0)
                                               : values[k][pick[k]].get<double>());

    double sum_p = 0, sum_r = 0, sum_iou = 0;
    for (const CorpusEntry& entry : corpus) {
      try {
        PipelineResult pr = run_pipeline_files(
            entry.cloud_path, options.use_labels ? entry.labels_path : std::string(), "", cfg);
        EvalReport report = evaluate_pair(pr.plan, load_floorplan(entry.gt_path), cfg.eval);
        sum_p += margin_value(report, options.score_margin, false);
        sum_r += margin_value(report, options.score_margin, true);
        sum_iou += report.iou;
      } catch (const Error&) {
        // failed fixture scores 0 for this grid point
      }
    }
    double n = corpus.empty() ? 1.0 : static_cast<double>(corpus.size());
    row.mean_precision = sum_p / n;
    row.mean_recall = sum_r / n;
    row.mean_iou = sum_iou / n;
    row.score = row.mean_precision + row.mean_recall + row.mean_iou;
    if (row.score > best_score) {
      best_score = row.score;
      result.best_index = g;
      result.best_config = cfg;
    }
    result.table.push_back(std::move(row));

    for (std::size_t k = keys.size(); k-- > 0;) {
      if (++pick[k] < values[k].size()) break;
      pick[k] = 0;
    }
  }
  return result;
}

}  // namespace floorgen
