#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "floorgen/error.hpp"
#include "floorgen/floorplan.hpp"

namespace floorgen {

namespace {

nlohmann::json vec2_json(const Vec2& v) { return nlohmann::json{v.x, v.y}; }

Vec2 vec2_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorKind::ParseError, "expected [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string floorplan_to_json(const Floorplan& fp) {
  nlohmann::json j;
  j["units"] = "m";
  j["walls"] = nlohmann::json::array();
  for (const WallSegment2D& w : fp.walls) {
    j["walls"].push_back({{"id", w.wall_id},
                          {"inner", {vec2_json(w.inner.a), vec2_json(w.inner.b)}},
                          {"outer", {vec2_json(w.outer.a), vec2_json(w.outer.b)}},
                          {"thickness", w.thickness}});
  }
  j["doors"] = nlohmann::json::array();
  for (const DoorOpening& d : fp.doors) {
    j["doors"].push_back({{"wall_id", d.wall_id},
                          {"center", vec2_json(d.center)},
                          {"width", d.width},
                          {"height", d.height}});
  }
  j["stairs"] = nlohmann::json::array();
  for (const auto& run : fp.stairs) {
    nlohmann::json lines = nlohmann::json::array();
    for (const Segment2& s : run)
      lines.push_back({vec2_json(s.first), vec2_json(s.second)});
    j["stairs"].push_back({{"lines", lines}});
  }
  j["rooms"] = nlohmann::json::array();
  for (const auto& room : fp.rooms) {
    nlohmann::json poly = nlohmann::json::array();
    for (const Vec2& p : room) poly.push_back(vec2_json(p));
    j["rooms"].push_back(poly);
  }
  return j.dump(2) + "\n";
}

Floorplan floorplan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("floorplan JSON: ") + e.what());
  }
  if (j.value("units", "m") != "m")
    throw Error(ErrorKind::UnsupportedFormat, "floorplan units must be meters");

  Floorplan fp;
  for (const auto& jw : j.value("walls", nlohmann::json::array())) {
    WallSegment2D w;
    w.wall_id = jw.at("id").get<int>();
    const auto& inner = jw.at("inner");
    const auto& outer = jw.at("outer");
    if (inner.size() != 2 || outer.size() != 2)
      throw Error(ErrorKind::ParseError, "wall folds must be 2-point polylines");
    w.inner = {vec2_from(inner[0]), vec2_from(inner[1])};
    w.outer = {vec2_from(outer[0]), vec2_from(outer[1])};
    w.thickness = jw.at("thickness").get<double>();
    fp.walls.push_back(w);
  }
  for (const auto& jd : j.value("doors", nlohmann::json::array())) {
    DoorOpening d;
    d.wall_id = jd.at("wall_id").get<int>();
    d.center = vec2_from(jd.at("center"));
    d.width = jd.at("width").get<double>();
    d.height = jd.at("height").get<double>();
    if (d.wall_id >= 0 && d.wall_id < static_cast<int>(fp.walls.size())) {
      const Line2D& inner = fp.walls[static_cast<std::size_t>(d.wall_id)].inner;
      double u_c = dot(d.center - inner.a, inner.dir());
      d.u_lo = u_c - 0.5 * d.width;
      d.u_hi = u_c + 0.5 * d.width;
    }
    fp.doors.push_back(d);
  }
  for (const auto& js : j.value("stairs", nlohmann::json::array())) {
    std::vector<Segment2> run;
    for (const auto& jl : js.at("lines")) {
      if (jl.size() != 2) throw Error(ErrorKind::ParseError, "stair line must have 2 points");
      run.emplace_back(vec2_from(jl[0]), vec2_from(jl[1]));
    }
    fp.stairs.push_back(std::move(run));
  }
  for (const auto& jr : j.value("rooms", nlohmann::json::array())) {
    std::vector<Vec2> room;
    for (const auto& jv : jr) room.push_back(vec2_from(jv));
    fp.rooms.push_back(std::move(room));
  }
  return fp;
}

Floorplan load_floorplan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return floorplan_from_json(ss.str());
}

void save_floorplan(const Floorplan& fp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << floorplan_to_json(fp);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

std::string floorplan_to_svg(const Floorplan& fp) {
  double xlo = std::numeric_limits<double>::infinity(), ylo = xlo;
  double xhi = -xlo, yhi = -ylo;
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
  for (const auto& run : fp.stairs)
    for (const Segment2& s : run) {
      grow(s.first);
      grow(s.second);
    }
  for (const auto& room : fp.rooms)
    for (const Vec2& p : room) grow(p);
  if (xlo > xhi) {
    xlo = ylo = 0.0;
    xhi = yhi = 1.0;
  }
  const double pad = 0.5;
  xlo -= pad;
  ylo -= pad;
  xhi += pad;
  yhi += pad;

  // 1 SVG user unit = 1 cm; plan y points up, SVG y points down.
  auto X = [&](double x) { return (x - xlo) * 100.0; };
  auto Y = [&](double y) { return (yhi - y) * 100.0; };

  std::ostringstream svg;
  svg.precision(2);
  svg << std::fixed;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << X(xhi) << ' '
      << Y(ylo) << "\">\n";

  svg << "  <g id=\"rooms\" fill=\"#e8f0e8\" stroke=\"#7a9a7a\" stroke-width=\"1\">\n";
  for (const auto& room : fp.rooms) {
    svg << "    <polygon points=\"";
    for (std::size_t i = 0; i < room.size(); ++i) {
      if (i) svg << ' ';
      svg << X(room[i].x) << ',' << Y(room[i].y);
    }
    svg << "\"/>\n";
  }
  svg << "  </g>\n";

  svg << "  <g id=\"walls\" stroke=\"#222222\" stroke-width=\"2\">\n";
  for (const WallSegment2D& w : fp.walls) {
    for (const Line2D* fold : {&w.inner, &w.outer})
      svg << "    <line x1=\"" << X(fold->a.x) << "\" y1=\"" << Y(fold->a.y) << "\" x2=\""
          << X(fold->b.x) << "\" y2=\"" << Y(fold->b.y) << "\"/>\n";
  }
  svg << "  </g>\n";

  svg << "  <g id=\"doors\" stroke=\"#b05020\" stroke-width=\"3\">\n";
  for (const DoorOpening& d : fp.doors) {
    if (d.wall_id < 0 || d.wall_id >= static_cast<int>(fp.walls.size())) continue;
    const Line2D& inner = fp.walls[static_cast<std::size_t>(d.wall_id)].inner;
    Vec2 a = inner.at(d.u_lo), b = inner.at(d.u_hi);
    svg << "    <line x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x)
        << "\" y2=\"" << Y(b.y) << "\"/>\n";
  }
  svg << "  </g>\n";

  svg << "  <g id=\"stairs\" stroke=\"#4060a0\" stroke-width=\"1.5\">\n";
  for (const auto& run : fp.stairs)
    for (const Segment2& s : run)
      svg << "    <line x1=\"" << X(s.first.x) << "\" y1=\"" << Y(s.first.y) << "\" x2=\""
          << X(s.second.x) << "\" y2=\"" << Y(s.second.y) << "\"/>\n";
  svg << "  </g>\n";

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace floorgen
