#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "floorgen/error.hpp"
#include "floorgen/pipeline.hpp"

namespace floorgen {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, "config: " + what);
}

void expect_keys(const json& j, const std::string& scope,
                 const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(scope + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) bad("unknown key '" + scope + key + "'");
}

double get_num(const json& j, const std::string& scope, const char* key, double fallback,
               double lo, double hi) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad(scope + key + " must be a number");
  double v = j[key].get<double>();
  if (v < lo || v > hi)
    bad(scope + key + " = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");
  return v;
}

std::size_t get_count(const json& j, const std::string& scope, const char* key,
                      std::size_t fallback, std::size_t lo) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    bad(scope + key + " must be a non-negative integer");
  auto v = j[key].get<std::size_t>();
  if (v < lo) bad(scope + key + " must be >= " + std::to_string(lo));
  return v;
}

bool get_bool(const json& j, const std::string& scope, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) bad(scope + key + " must be a boolean");
  return j[key].get<bool>();
}

std::pair<double, double> get_range(const json& j, const std::string& scope, const char* key,
                                    std::pair<double, double> fallback, double lo, double hi) {
  if (!j.contains(key)) return fallback;
  const json& r = j[key];
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    bad(scope + key + " must be [lo, hi]");
  double a = r[0].get<double>(), b = r[1].get<double>();
  if (a > b || a < lo || b > hi) bad(scope + key + " is not a valid range");
  return {a, b};
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["normal_k"] = c.normal_k;
  j["outlier"] = {{"enabled", c.outlier_enabled},
                  {"k", c.outlier_k},
                  {"std_ratio", c.outlier_std_ratio}};
  j["normalize"] = {{"align_rotation", c.normalize.align_rotation}};
  j["levels"] = {{"bin_size", c.level_bin_size},
                 {"peak_prominence", c.level_prominence},
                 {"min_story", c.level_min_story}};
  j["annotation"] = {{"offset", c.annotation.offset},
                     {"door_z_max", c.annotation.door_z_max}};
  j["walls"] = {{"vertical_tolerance_deg", rad2deg(c.wall_vertical_tolerance)},
                {"angle_thresh_deg", rad2deg(c.wall_angle_thresh)},
                {"radius", c.wall_radius},
                {"min_cluster", c.wall_min_cluster},
                {"min_points", c.wall_min_points},
                {"min_height_fraction", c.wall_min_height_fraction}};
  j["doors"] = {{"cell", c.door_cell},
                {"min_clear_height", c.door_min_clear_height},
                {"width", {c.door_bounds.width_min, c.door_bounds.width_max}},
                {"height", {c.door_bounds.height_min, c.door_bounds.height_max}},
                {"aspect", {c.door_bounds.aspect_min, c.door_bounds.aspect_max}}};
  j["stairs"] = {{"riser", {c.stairs.riser_min, c.stairs.riser_max}},
                 {"tread", {c.stairs.tread_min, c.stairs.tread_max}},
                 {"min_steps", c.stairs.min_steps},
                 {"min_patch_points", c.stairs.min_patch_points},
                 {"grow_radius", c.stairs.grow_radius}};
  j["ransac"] = {{"iterations", c.ransac.iterations},
                 {"inlier_dist", c.ransac.inlier_dist},
                 {"min_inlier_ratio", c.ransac.min_inlier_ratio},
                 {"min_second_fold_fraction", c.ransac.min_second_fold_fraction},
                 {"default_thickness", c.ransac.default_thickness},
                 {"max_thickness", c.ransac.max_thickness}};
  j["assemble"] = {{"snap_dist", c.assemble.snap_dist},
                   {"room_resolution", c.assemble.room_resolution},
                   {"min_room_area", c.assemble.min_room_area}};
  j["evaluate"] = {{"resolution", c.eval.resolution},
                   {"margins", c.eval.margins},
                   {"max_warp", c.eval.max_warp}};
  if (c.crop_z) j["crop_z"] = {c.crop_z->first, c.crop_z->second};
  else j["crop_z"] = nullptr;
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config JSON: ") + e.what());
  }
  expect_keys(j, "", {"seed", "normal_k", "outlier", "normalize", "levels", "annotation",
                      "walls", "doors", "stairs", "ransac", "assemble", "evaluate", "crop_z"});

  PipelineConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) bad("seed must be an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.normal_k = get_count(j, "", "normal_k", c.normal_k, 3);

  if (j.contains("outlier")) {
    const json& o = j["outlier"];
    expect_keys(o, "outlier.", {"enabled", "k", "std_ratio"});
    c.outlier_enabled = get_bool(o, "outlier.", "enabled", c.outlier_enabled);
    c.outlier_k = get_count(o, "outlier.", "k", c.outlier_k, 1);
    c.outlier_std_ratio = get_num(o, "outlier.", "std_ratio", c.outlier_std_ratio, 0.0, 1e9);
  }
  if (j.contains("normalize")) {
    const json& o = j["normalize"];
    expect_keys(o, "normalize.", {"align_rotation"});
    c.normalize.align_rotation = get_bool(o, "normalize.", "align_rotation", true);
  }
  if (j.contains("levels")) {
    const json& o = j["levels"];
    expect_keys(o, "levels.", {"bin_size", "peak_prominence", "min_story"});
    c.level_bin_size = get_num(o, "levels.", "bin_size", c.level_bin_size, 1e-4, 1.0);
    c.level_prominence = get_num(o, "levels.", "peak_prominence", c.level_prominence, 0.0, 1.0);
    c.level_min_story = get_num(o, "levels.", "min_story", c.level_min_story, 0.1, 10.0);
  }
  if (j.contains("annotation")) {
    const json& o = j["annotation"];
    expect_keys(o, "annotation.", {"offset", "door_z_max"});
    c.annotation.offset = get_num(o, "annotation.", "offset", c.annotation.offset, 1e-4, 5.0);
    c.annotation.door_z_max =
        get_num(o, "annotation.", "door_z_max", c.annotation.door_z_max, 0.1, 10.0);
  }
  if (j.contains("walls")) {
    const json& o = j["walls"];
    expect_keys(o, "walls.",
                {"vertical_tolerance_deg", "angle_thresh_deg", "radius", "min_cluster",
                 "min_points", "min_height_fraction"});
    c.wall_vertical_tolerance = deg2rad(get_num(
        o, "walls.", "vertical_tolerance_deg", rad2deg(c.wall_vertical_tolerance), 0.1, 45.0));
    c.wall_angle_thresh = deg2rad(
        get_num(o, "walls.", "angle_thresh_deg", rad2deg(c.wall_angle_thresh), 0.1, 90.0));
    c.wall_radius = get_num(o, "walls.", "radius", c.wall_radius, 1e-3, 5.0);
    c.wall_min_cluster = get_count(o, "walls.", "min_cluster", c.wall_min_cluster, 1);
    c.wall_min_points = get_count(o, "walls.", "min_points", c.wall_min_points, 1);
    c.wall_min_height_fraction =
        get_num(o, "walls.", "min_height_fraction", c.wall_min_height_fraction, 0.0, 1.0);
  }
  if (j.contains("doors")) {
    const json& o = j["doors"];
    expect_keys(o, "doors.", {"cell", "min_clear_height", "width", "height", "aspect"});
    c.door_cell = get_num(o, "doors.", "cell", c.door_cell, 1e-3, 1.0);
    c.door_min_clear_height =
        get_num(o, "doors.", "min_clear_height", c.door_min_clear_height, 0.1, 10.0);
    auto [wlo, whi] = get_range(o, "doors.", "width",
                                {c.door_bounds.width_min, c.door_bounds.width_max}, 0.0, 10.0);
    auto [hlo, hhi] = get_range(o, "doors.", "height",
                                {c.door_bounds.height_min, c.door_bounds.height_max}, 0.0, 10.0);
    auto [alo, ahi] = get_range(o, "doors.", "aspect",
                                {c.door_bounds.aspect_min, c.door_bounds.aspect_max}, 0.0, 100.0);
    c.door_bounds = {wlo, whi, hlo, hhi, alo, ahi};
  }
  if (j.contains("stairs")) {
    const json& o = j["stairs"];
    expect_keys(o, "stairs.", {"riser", "tread", "min_steps", "min_patch_points", "grow_radius"});
    auto [rlo, rhi] =
        get_range(o, "stairs.", "riser", {c.stairs.riser_min, c.stairs.riser_max}, 0.0, 1.0);
    auto [tlo, thi] =
        get_range(o, "stairs.", "tread", {c.stairs.tread_min, c.stairs.tread_max}, 0.0, 2.0);
    c.stairs.riser_min = rlo;
    c.stairs.riser_max = rhi;
    c.stairs.tread_min = tlo;
    c.stairs.tread_max = thi;
    c.stairs.min_steps = get_count(o, "stairs.", "min_steps", c.stairs.min_steps, 2);
    c.stairs.min_patch_points =
        get_count(o, "stairs.", "min_patch_points", c.stairs.min_patch_points, 3);
    c.stairs.grow_radius = get_num(o, "stairs.", "grow_radius", c.stairs.grow_radius, 1e-3, 1.0);
  }
  if (j.contains("ransac")) {
    const json& o = j["ransac"];
    expect_keys(o, "ransac.",
                {"iterations", "inlier_dist", "min_inlier_ratio", "min_second_fold_fraction",
                 "default_thickness", "max_thickness"});
    c.ransac.iterations =
        static_cast<int>(get_count(o, "ransac.", "iterations",
                                   static_cast<std::size_t>(c.ransac.iterations), 1));
    c.ransac.inlier_dist = get_num(o, "ransac.", "inlier_dist", c.ransac.inlier_dist, 1e-4, 1.0);
    c.ransac.min_inlier_ratio =
        get_num(o, "ransac.", "min_inlier_ratio", c.ransac.min_inlier_ratio, 0.0, 1.0);
    c.ransac.min_second_fold_fraction = get_num(o, "ransac.", "min_second_fold_fraction",
                                                c.ransac.min_second_fold_fraction, 0.0, 1.0);
    c.ransac.default_thickness =
        get_num(o, "ransac.", "default_thickness", c.ransac.default_thickness, 1e-3, 1.0);
    c.ransac.max_thickness =
        get_num(o, "ransac.", "max_thickness", c.ransac.max_thickness, 1e-3, 2.0);
  }
  if (j.contains("assemble")) {
    const json& o = j["assemble"];
    expect_keys(o, "assemble.", {"snap_dist", "room_resolution", "min_room_area"});
    c.assemble.snap_dist = get_num(o, "assemble.", "snap_dist", c.assemble.snap_dist, 0.0, 2.0);
    c.assemble.room_resolution =
        get_num(o, "assemble.", "room_resolution", c.assemble.room_resolution, 1e-3, 1.0);
    c.assemble.min_room_area =
        get_num(o, "assemble.", "min_room_area", c.assemble.min_room_area, 0.0, 1e6);
  }
  if (j.contains("evaluate")) {
    const json& o = j["evaluate"];
    expect_keys(o, "evaluate.", {"resolution", "margins", "max_warp"});
    c.eval.resolution = get_num(o, "evaluate.", "resolution", c.eval.resolution, 1e-3, 1.0);
    if (o.contains("margins")) {
      if (!o["margins"].is_array() || o["margins"].empty()) bad("evaluate.margins must be a list");
      c.eval.margins.clear();
      double prev = 0.0;
      for (const auto& m : o["margins"]) {
        if (!m.is_number()) bad("evaluate.margins entries must be numbers");
        double v = m.get<double>();
        if (v <= 0.0 || v < prev) bad("evaluate.margins must be positive and ascending");
        c.eval.margins.push_back(v);
        prev = v;
      }
    }
    c.eval.max_warp =
        static_cast<int>(get_count(o, "evaluate.", "max_warp",
                                   static_cast<std::size_t>(c.eval.max_warp), 0));
  }
  if (j.contains("crop_z") && !j["crop_z"].is_null()) {
    auto [lo, hi] = get_range(j, "", "crop_z", {0.0, 0.0}, -1e6, 1e6);
    c.crop_z = {lo, hi};
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace floorgen
