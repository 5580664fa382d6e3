#include "floorgen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floorgen/error.hpp"
#include "floorgen/rng.hpp"

namespace floorgen {

namespace {

struct Builder {
  const BuildingSpec& spec;
  SplitMix64 rng;
  LabeledPointCloud cloud;

  explicit Builder(const BuildingSpec& s) : spec(s), rng(s.seed) {
    cloud.labels.emplace();
  }

  void add(const Vec3& p, const Vec3& noise_dir, SemanticClass label) {
    Vec3 q = p;
    if (spec.noise_sigma > 0.0) q = q + noise_dir * (spec.noise_sigma * rng.next_gaussian());
    cloud.positions.push_back(q);
    cloud.labels->push_back(label);
  }

  // Jittered-grid sampling of the rectangle origin + s*s_axis + t*t_axis,
  // s in [0, s_len], t in [0, t_len]. `keep` can reject cells (door cutouts).
  template <typename Keep>
  void sample_rect(const Vec3& origin, const Vec3& s_axis, double s_len, const Vec3& t_axis,
                   double t_len, const Vec3& normal, SemanticClass label, const Keep& keep) {
    if (s_len <= 0.0 || t_len <= 0.0) return;
    double pitch = 1.0 / std::sqrt(spec.density);
    auto ns = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s_len / pitch)));
    auto nt = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_len / pitch)));
    double ds = s_len / static_cast<double>(ns);
    double dt = t_len / static_cast<double>(nt);
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        double s = (static_cast<double>(i) + rng.next_double()) * ds;
        double t = (static_cast<double>(j) + rng.next_double()) * dt;
        if (!keep(s, t)) continue;
        add(origin + s_axis * s + t_axis * t, normal, label);
      }
  }

  void sample_rect(const Vec3& origin, const Vec3& s_axis, double s_len, const Vec3& t_axis,
                   double t_len, const Vec3& normal, SemanticClass label) {
    sample_rect(origin, s_axis, s_len, t_axis, t_len, normal, label,
                [](double, double) { return true; });
  }
};

struct Footprint {
  double xlo = std::numeric_limits<double>::infinity();
  double ylo = std::numeric_limits<double>::infinity();
  double xhi = -std::numeric_limits<double>::infinity();
  double yhi = -std::numeric_limits<double>::infinity();
};

Footprint wall_footprint(const BuildingSpec& spec) {
  Footprint f;
  for (const WallSpec& w : spec.walls) {
    for (const Vec2& p : {w.a, w.b}) {
      f.xlo = std::min(f.xlo, p.x);
      f.ylo = std::min(f.ylo, p.y);
      f.xhi = std::max(f.xhi, p.x);
      f.yhi = std::max(f.yhi, p.y);
    }
  }
  return f;
}

void validate(const BuildingSpec& spec) {
  if (!(spec.density > 0.0)) throw Error(ErrorKind::InvalidSpec, "density must be positive");
  if (spec.noise_sigma < 0.0) throw Error(ErrorKind::InvalidSpec, "noise_sigma must be >= 0");
  if (spec.walls.empty()) throw Error(ErrorKind::InvalidSpec, "building needs walls");
  if (!(spec.story_height > 0.0))
    throw Error(ErrorKind::InvalidSpec, "story height must be positive");
  for (const WallSpec& w : spec.walls) {
    if (norm(w.b - w.a) < 1e-9) throw Error(ErrorKind::InvalidSpec, "zero-length wall");
    if (!(w.thickness > 0.0)) throw Error(ErrorKind::InvalidSpec, "wall thickness must be > 0");
  }
  for (const DoorSpec& d : spec.doors) {
    if (d.wall >= spec.walls.size()) throw Error(ErrorKind::InvalidSpec, "door wall index");
    const WallSpec& w = spec.walls[d.wall];
    double len = norm(w.b - w.a);
    if (d.u - 0.5 * d.width < 0.0 || d.u + 0.5 * d.width > len)
      throw Error(ErrorKind::InvalidSpec, "door extends beyond its wall");
    if (d.height > spec.story_height)
      throw Error(ErrorKind::InvalidSpec, "door taller than the story");
  }
}

}  // namespace

Floorplan ground_truth_floorplan(const BuildingSpec& spec) {
  validate(spec);

  Vec2 interior{0, 0};
  for (const WallSpec& w : spec.walls) interior = interior + (w.a + w.b) * 0.5;
  interior = interior * (1.0 / static_cast<double>(spec.walls.size()));

  Floorplan fp;
  for (std::size_t i = 0; i < spec.walls.size(); ++i) {
    const WallSpec& w = spec.walls[i];
    Vec2 dir = normalized(w.b - w.a);
    Vec2 n = perp(dir);
    double side = dot(n, interior - w.a) >= 0.0 ? 1.0 : -1.0;
    Vec2 inner_shift = n * (side * 0.5 * w.thickness);
    Vec2 outer_shift = n * (-side * 0.5 * w.thickness);
    WallSegment2D seg;
    seg.wall_id = static_cast<int>(i);
    seg.inner = {w.a + inner_shift, w.b + inner_shift};
    seg.outer = {w.a + outer_shift, w.b + outer_shift};
    seg.thickness = w.thickness;
    fp.walls.push_back(seg);
  }
  for (const DoorSpec& d : spec.doors) {
    const WallSpec& w = spec.walls[d.wall];
    Vec2 dir = normalized(w.b - w.a);
    DoorOpening door;
    door.wall_id = static_cast<int>(d.wall);
    door.center = w.a + dir * d.u;
    door.width = d.width;
    door.height = d.height;
    const Line2D& inner = fp.walls[d.wall].inner;
    double u_c = dot(door.center - inner.a, inner.dir());
    door.u_lo = u_c - 0.5 * d.width;
    door.u_hi = u_c + 0.5 * d.width;
    fp.doors.push_back(door);
  }
  if (spec.stairs) {
    const StairSpec& st = *spec.stairs;
    Vec2 dir = normalized(st.direction);
    Vec2 lat = perp(dir);
    std::vector<Segment2> lines;
    for (std::size_t i = 0; i <= st.steps; ++i) {
      Vec2 at = st.origin + dir * (static_cast<double>(i) * st.tread);
      lines.emplace_back(at - lat * (0.5 * st.width), at + lat * (0.5 * st.width));
    }
    fp.stairs.push_back(std::move(lines));
  }
  fp.rooms = segment_rooms(fp, 0.02, 1.0);
  return fp;
}

std::pair<LabeledPointCloud, Floorplan> generate_building(const BuildingSpec& spec) {
  Floorplan gt = ground_truth_floorplan(spec);

  Builder bld(spec);
  const double H = spec.story_height;

  // Wall faces at +-thickness/2, with door rectangles cut out.
  for (std::size_t wi = 0; wi < spec.walls.size(); ++wi) {
    const WallSpec& w = spec.walls[wi];
    Vec2 dir2 = normalized(w.b - w.a);
    Vec2 n2 = perp(dir2);
    double len = norm(w.b - w.a);
    Vec3 dir3{dir2.x, dir2.y, 0};
    Vec3 n3{n2.x, n2.y, 0};
    auto outside_doors = [&](double u, double z) {
      for (const DoorSpec& d : spec.doors) {
        if (d.wall != wi) continue;
        if (std::abs(u - d.u) <= 0.5 * d.width && z <= d.height) return false;
      }
      return true;
    };
    for (double side : {0.5, -0.5}) {
      Vec3 origin{w.a.x + n2.x * side * w.thickness, w.a.y + n2.y * side * w.thickness, 0.0};
      bld.sample_rect(origin, dir3, len, Vec3{0, 0, 1}, H, n3, SemanticClass::Wall,
                      outside_doors);
    }
  }

  Footprint fpf = wall_footprint(spec);
  double fx = fpf.xhi - fpf.xlo, fy = fpf.yhi - fpf.ylo;

  if (spec.slabs) {
    bld.sample_rect({fpf.xlo, fpf.ylo, 0.0}, {1, 0, 0}, fx, {0, 1, 0}, fy, {0, 0, 1},
                    SemanticClass::Floor);
    bld.sample_rect({fpf.xlo, fpf.ylo, H}, {1, 0, 0}, fx, {0, 1, 0}, fy, {0, 0, 1},
                    SemanticClass::Ceiling);
  }

  if (spec.stairs) {
    const StairSpec& st = *spec.stairs;
    Vec2 dir2 = normalized(st.direction);
    Vec2 lat2 = perp(dir2);
    Vec3 dir3{dir2.x, dir2.y, 0}, lat3{lat2.x, lat2.y, 0};
    for (std::size_t i = 0; i < st.steps; ++i) {
      double u = static_cast<double>(i) * st.tread;
      double z0 = static_cast<double>(i) * st.riser;
      Vec2 base2 = st.origin + dir2 * u - lat2 * (0.5 * st.width);
      // Riser face (vertical), then the tread on top of it.
      bld.sample_rect({base2.x, base2.y, z0}, lat3, st.width, {0, 0, 1}, st.riser, dir3,
                      SemanticClass::Stair);
      bld.sample_rect({base2.x, base2.y, z0 + st.riser}, dir3, st.tread, lat3, st.width,
                      {0, 0, 1}, SemanticClass::Stair);
    }
  }

  if (spec.clutter_density > 0.0 && fx > 0 && fy > 0) {
    double volume = fx * fy * H;
    auto count = static_cast<std::size_t>(std::llround(spec.clutter_density * volume));
    for (std::size_t i = 0; i < count; ++i) {
      Vec3 p{bld.rng.next_double(fpf.xlo, fpf.xhi), bld.rng.next_double(fpf.ylo, fpf.yhi),
             bld.rng.next_double(0.0, H)};
      bld.cloud.positions.push_back(p);
      bld.cloud.labels->push_back(SemanticClass::Clutter);
    }
  }

  // Box furniture: four vertical sides plus a top, all clutter-labeled.
  for (std::size_t k = 0; k < spec.furniture_boxes; ++k) {
    double bw = bld.rng.next_double(0.5, 1.5);
    double bd = bld.rng.next_double(0.5, 1.5);
    double bh = bld.rng.next_double(0.5, 1.2);
    double margin = 0.9;
    double cx = bld.rng.next_double(fpf.xlo + margin, std::max(fpf.xlo + margin, fpf.xhi - margin));
    double cy = bld.rng.next_double(fpf.ylo + margin, std::max(fpf.ylo + margin, fpf.yhi - margin));
    double yaw = bld.rng.next_double(0.0, kPi / 2.0);
    Vec2 bx{std::cos(yaw), std::sin(yaw)};
    Vec2 by = perp(bx);
    Vec3 ex{bx.x, bx.y, 0}, ey{by.x, by.y, 0};
    Vec3 c0{cx - 0.5 * (bw * bx.x + bd * by.x), cy - 0.5 * (bw * bx.y + bd * by.y), 0.0};
    bld.sample_rect(c0, ex, bw, {0, 0, 1}, bh, ey, SemanticClass::Clutter);
    bld.sample_rect(c0 + ey * bd, ex, bw, {0, 0, 1}, bh, ey, SemanticClass::Clutter);
    bld.sample_rect(c0, ey, bd, {0, 0, 1}, bh, ex, SemanticClass::Clutter);
    bld.sample_rect(c0 + ex * bw, ey, bd, {0, 0, 1}, bh, ex, SemanticClass::Clutter);
    bld.sample_rect(c0 + Vec3{0, 0, bh}, ex, bw, ey, bd, {0, 0, 1}, SemanticClass::Clutter);
  }

  // Occlusion masks model scan shadows: points inside them never made it
  // back to the scanner.
  if (!spec.occlusion_disks.empty() || !spec.occlusion_halfplanes.empty()) {
    std::vector<std::size_t> keep;
    keep.reserve(bld.cloud.size());
    for (std::size_t i = 0; i < bld.cloud.size(); ++i) {
      Vec2 p = bld.cloud.positions[i].xy();
      bool occluded = false;
      for (const OcclusionDisk& d : spec.occlusion_disks)
        if (norm2(p - d.center) <= d.radius * d.radius) {
          occluded = true;
          break;
        }
      if (!occluded)
        for (const OcclusionHalfPlane& hp : spec.occlusion_halfplanes)
          if (dot(hp.normal, p) >= hp.offset) {
            occluded = true;
            break;
          }
      if (!occluded) keep.push_back(i);
    }
    bld.cloud = bld.cloud.select(keep);
  }

  return {std::move(bld.cloud), std::move(gt)};
}

DrawingSet drawing_from_spec(const BuildingSpec& spec) {
  DrawingSet d;
  for (const WallSpec& w : spec.walls) d.walls.push_back({w.a, w.b});
  for (const DoorSpec& dr : spec.doors) {
    const WallSpec& w = spec.walls[dr.wall];
    Vec2 dir = normalized(w.b - w.a);
    Vec2 c = w.a + dir * dr.u;
    d.doors.push_back({c - dir * (0.5 * dr.width), c + dir * (0.5 * dr.width)});
  }
  if (spec.stairs) {
    const StairSpec& st = *spec.stairs;
    Vec2 dir = normalized(st.direction);
    double run = static_cast<double>(st.steps) * st.tread;
    d.stairs.push_back({st.origin, st.origin + dir * run});
  }
  return d;
}

std::vector<std::pair<std::string, BuildingSpec>> standard_corpus(std::uint64_t seed) {
  std::vector<std::pair<std::string, BuildingSpec>> corpus;

  {  // One room, one door.
    BuildingSpec s;
    s.walls = {{{0, 0}, {4, 0}, 0.12},
               {{4, 0}, {4, 3}, 0.12},
               {{4, 3}, {0, 3}, 0.12},
               {{0, 3}, {0, 0}, 0.12}};
    s.doors = {{0, 2.0, 0.9, 2.1}};
    s.density = 2000;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 1);
    corpus.emplace_back("rect1", s);
  }
  {  // Partition plus two doors.
    BuildingSpec s;
    s.walls = {{{0, 0}, {6, 0}, 0.12}, {{6, 0}, {6, 4}, 0.12}, {{6, 4}, {0, 4}, 0.12},
               {{0, 4}, {0, 0}, 0.12}, {{3, 0}, {3, 4}, 0.12}};
    s.doors = {{4, 2.0, 0.9, 2.1}, {0, 1.5, 0.9, 2.1}};
    s.density = 1100;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 2);
    corpus.emplace_back("tworoom", s);
  }
  {  // Five rooms off a corridor: six enclosed spaces.
    BuildingSpec s;
    s.walls = {{{0, 0}, {10, 0}, 0.12}, {{10, 0}, {10, 6}, 0.12}, {{10, 6}, {0, 6}, 0.12},
               {{0, 6}, {0, 0}, 0.12},  {{0, 2}, {10, 2}, 0.12},  {{2, 2}, {2, 6}, 0.12},
               {{4, 2}, {4, 6}, 0.12},  {{6, 2}, {6, 6}, 0.12},   {{8, 2}, {8, 6}, 0.12}};
    s.doors = {{4, 1.0, 0.9, 2.1}, {4, 3.0, 0.9, 2.1}, {4, 5.0, 0.9, 2.1},
               {4, 7.0, 0.9, 2.1}, {4, 9.0, 0.9, 2.1}, {0, 5.0, 0.9, 2.1}};
    s.density = 450;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 3);
    corpus.emplace_back("corridor", s);
  }
  {  // Non-convex outline.
    BuildingSpec s;
    s.walls = {{{0, 0}, {5, 0}, 0.12}, {{5, 0}, {5, 3}, 0.12}, {{5, 3}, {3, 3}, 0.12},
               {{3, 3}, {3, 5}, 0.12}, {{3, 5}, {0, 5}, 0.12}, {{0, 5}, {0, 0}, 0.12}};
    s.doors = {{0, 2.5, 0.9, 2.1}};
    s.density = 1300;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 4);
    corpus.emplace_back("lshape", s);
  }
  {  // One straight stair run in a hall.
    BuildingSpec s;
    s.walls = {{{0, 0}, {6, 0}, 0.12}, {{6, 0}, {6, 4}, 0.12}, {{6, 4}, {0, 4}, 0.12},
               {{0, 4}, {0, 0}, 0.12}};
    s.doors = {{0, 3.0, 0.9, 2.1}};
    s.stairs = StairSpec{{1.5, 2.0}, {1, 0}, 10, 0.17, 0.28, 1.2};
    s.density = 1250;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 5);
    corpus.emplace_back("stairhall", s);
  }
  {  // tworoom under ~20% clutter, furniture and scan shadows.
    BuildingSpec s;
    s.walls = {{{0, 0}, {6, 0}, 0.12}, {{6, 0}, {6, 4}, 0.12}, {{6, 4}, {0, 4}, 0.12},
               {{0, 4}, {0, 0}, 0.12}, {{3, 0}, {3, 4}, 0.12}};
    s.doors = {{4, 2.0, 0.9, 2.1}, {0, 1.5, 0.9, 2.1}};
    s.density = 1100;
    s.noise_sigma = 0.004;
    s.clutter_density = 720;
    s.furniture_boxes = 6;
    s.occlusion_disks = {{{2.0, 0.3}, 0.5}, {{4.8, 2.8}, 0.7}};
    s.seed = derive_stream(seed, 6);
    corpus.emplace_back("cluttered", s);
  }
  {  // Walls only: no floor or ceiling surfaces, exercising the level fallback.
    BuildingSpec s;
    s.walls = {{{0, 0}, {5, 0}, 0.12}, {{5, 0}, {5, 4}, 0.12}, {{5, 4}, {0, 4}, 0.12},
               {{0, 4}, {0, 0}, 0.12}};
    s.slabs = false;
    s.density = 1500;
    s.noise_sigma = 0.002;
    s.seed = derive_stream(seed, 7);
    corpus.emplace_back("nocolor-noslab", s);
  }
  return corpus;
}

BuildingSpec corpus_fixture(const std::string& name, std::uint64_t seed) {
  for (auto& [n, spec] : standard_corpus(seed))
    if (n == name) return spec;
  throw Error(ErrorKind::InvalidSpec, "unknown fixture '" + name + "'");
}

}  // namespace floorgen
