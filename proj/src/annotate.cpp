#include "floorgen/annotate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "floorgen/error.hpp"

namespace floorgen {

namespace {

void validate_polylines(const std::vector<Polyline2D>& lines, const char* cls) {
  for (const Polyline2D& pl : lines) {
    if (pl.size() < 2)
      throw Error(ErrorKind::InvalidSpec,
                  std::string(cls) + " polyline has fewer than 2 vertices");
    for (std::size_t i = 1; i < pl.size(); ++i)
      if (pl[i] == pl[i - 1])
        throw Error(ErrorKind::InvalidSpec,
                    std::string(cls) + " polyline has consecutive duplicate vertices");
  }
}

struct Segments {
  std::vector<Vec2> a, b;

  void add(const std::vector<Polyline2D>& lines) {
    for (const Polyline2D& pl : lines)
      for (std::size_t i = 1; i < pl.size(); ++i) {
        a.push_back(pl[i - 1]);
        b.push_back(pl[i]);
      }
  }

  bool within(const Vec2& p, double offset) const {
    double o2 = offset * offset;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (point_segment_dist2(p, a[i], b[i]) <= o2) return true;
    return false;
  }
};

struct Bbox2 {
  double xlo = std::numeric_limits<double>::infinity();
  double ylo = std::numeric_limits<double>::infinity();
  double xhi = -std::numeric_limits<double>::infinity();
  double yhi = -std::numeric_limits<double>::infinity();

  void grow(const Vec2& p) {
    xlo = std::min(xlo, p.x);
    ylo = std::min(ylo, p.y);
    xhi = std::max(xhi, p.x);
    yhi = std::max(yhi, p.y);
  }
  void inflate(double m) { xlo -= m; ylo -= m; xhi += m; yhi += m; }
  bool valid() const { return xhi >= xlo && yhi >= ylo; }
  double area() const { return valid() ? (xhi - xlo) * (yhi - ylo) : 0.0; }
};

double overlap_fraction(Bbox2 a, Bbox2 b) {
  double ix = std::min(a.xhi, b.xhi) - std::max(a.xlo, b.xlo);
  double iy = std::min(a.yhi, b.yhi) - std::max(a.ylo, b.ylo);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  double denom = std::min(a.area(), b.area());
  return denom > 0.0 ? ix * iy / denom : 0.0;
}

}  // namespace

void DrawingSet::validate() const {
  validate_polylines(walls, "wall");
  validate_polylines(doors, "door");
  validate_polylines(stairs, "stair");
}

LabeledPointCloud annotate_from_drawing(const LabeledPointCloud& cloud,
                                        const DrawingSet& drawing,
                                        const FloorCeilingLevels& levels,
                                        const AnnotationParams& params, Exec exec) {
  drawing.validate();

  Segments wall_segs, door_segs, stair_segs;
  wall_segs.add(drawing.walls);
  door_segs.add(drawing.doors);
  stair_segs.add(drawing.stairs);

  double wall_off = params.wall_offset.value_or(params.offset);
  double door_off = params.door_offset.value_or(params.offset);
  double stair_off = params.stair_offset.value_or(params.offset);
  double max_off = std::max({wall_off, door_off, stair_off});

  Bbox2 cloud_box, draw_box;
  for (const Vec3& p : cloud.positions) cloud_box.grow(p.xy());
  for (const Segments* s : {&wall_segs, &door_segs, &stair_segs})
    for (std::size_t i = 0; i < s->a.size(); ++i) {
      draw_box.grow(s->a[i]);
      draw_box.grow(s->b[i]);
    }
  if (!draw_box.valid())
    throw Error(ErrorKind::InvalidSpec, "drawing contains no polylines");
  cloud_box.inflate(max_off);
  draw_box.inflate(max_off);
  if (overlap_fraction(cloud_box, draw_box) < 0.10)
    throw Error(ErrorKind::FrameMismatch,
                "cloud and drawing bounding boxes overlap < 10%; is the cloud normalized?");

  LabeledPointCloud out = cloud;
  out.labels.emplace(cloud.size(), SemanticClass::Clutter);

  const double door_z_hi = levels.z_floor + params.door_z_max;
  const bool par = exec == Exec::Parallel;
  const long long n = static_cast<long long>(cloud.size());
#pragma omp parallel for schedule(static) if (par)
  for (long long i = 0; i < n; ++i) {
    const Vec3& p = cloud.positions[static_cast<std::size_t>(i)];
    Vec2 q = p.xy();
    SemanticClass label = SemanticClass::Clutter;
    if (std::abs(p.z - levels.z_floor) <= levels.slab_tolerance)
      label = SemanticClass::Floor;
    else if (std::abs(p.z - levels.z_ceiling) <= levels.slab_tolerance)
      label = SemanticClass::Ceiling;
    else if (p.z <= door_z_hi && door_segs.within(q, door_off))
      label = SemanticClass::Door;
    else if (stair_segs.within(q, stair_off))
      label = SemanticClass::Stair;
    else if (wall_segs.within(q, wall_off))
      label = SemanticClass::Wall;
    (*out.labels)[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

LabeledPointCloud load_labels(const LabeledPointCloud& cloud, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);

  std::vector<SemanticClass> labels;
  labels.reserve(cloud.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    long v;
    if (!(ss >> v)) continue;  // blank or comment-only line
    std::string rest;
    if (ss >> rest)
      throw Error(ErrorKind::ParseError,
                  path + ":" + std::to_string(lineno) + ": trailing token '" + rest + "'");
    if (v < 0 || v >= kNumSemanticClasses)
      throw Error(ErrorKind::OutOfRangeLabel,
                  path + ":" + std::to_string(lineno) + ": label " + std::to_string(v));
    labels.push_back(static_cast<SemanticClass>(v));
  }
  if (labels.size() != cloud.size())
    throw Error(ErrorKind::LengthMismatch,
                path + ": " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(cloud.size()) + " points");
  LabeledPointCloud out = cloud;
  out.labels = std::move(labels);
  return out;
}

void save_labels(const LabeledPointCloud& cloud, const std::string& path) {
  if (!cloud.labels) throw Error(ErrorKind::InvalidSpec, "cloud has no labels to save");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  for (SemanticClass c : *cloud.labels) out << int(c) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

namespace {

std::vector<Polyline2D> polylines_from_json(const nlohmann::json& j, const std::string& path) {
  std::vector<Polyline2D> out;
  for (const auto& jpl : j) {
    Polyline2D pl;
    for (const auto& jv : jpl) {
      if (!jv.is_array() || jv.size() != 2)
        throw Error(ErrorKind::ParseError, path + ": polyline vertex is not [x, y]");
      pl.push_back({jv[0].get<double>(), jv[1].get<double>()});
    }
    out.push_back(std::move(pl));
  }
  return out;
}

}  // namespace

DrawingSet load_drawing(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  if (j.value("units", "m") != "m")
    throw Error(ErrorKind::UnsupportedFormat, path + ": units must be meters");

  DrawingSet d;
  for (const auto& jc : j.at("classes")) {
    std::string cls = jc.at("class").get<std::string>();
    auto lines = polylines_from_json(jc.at("polylines"), path);
    if (cls == "wall") d.walls = std::move(lines);
    else if (cls == "door") d.doors = std::move(lines);
    else if (cls == "stair") d.stairs = std::move(lines);
    else throw Error(ErrorKind::ParseError, path + ": unknown class '" + cls + "'");
  }
  d.validate();
  return d;
}

void save_drawing(const DrawingSet& drawing, const std::string& path) {
  auto lines_to_json = [](const std::vector<Polyline2D>& lines) {
    nlohmann::json out = nlohmann::json::array();
    for (const Polyline2D& pl : lines) {
      nlohmann::json jpl = nlohmann::json::array();
      for (const Vec2& v : pl) jpl.push_back({v.x, v.y});
      out.push_back(jpl);
    }
    return out;
  };
  nlohmann::json j;
  j["units"] = "m";
  j["classes"] = {{{"class", "wall"}, {"polylines", lines_to_json(drawing.walls)}},
                  {{"class", "door"}, {"polylines", lines_to_json(drawing.doors)}},
                  {{"class", "stair"}, {"polylines", lines_to_json(drawing.stairs)}}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace floorgen
