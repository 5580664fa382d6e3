#include "floorgen/point_cloud.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "floorgen/error.hpp"

namespace floorgen {

const char* to_string(SemanticClass c) {
  switch (c) {
    case SemanticClass::Ceiling: return "ceiling";
    case SemanticClass::Floor: return "floor";
    case SemanticClass::Wall: return "wall";
    case SemanticClass::Door: return "door";
    case SemanticClass::Stair: return "stair";
    case SemanticClass::Clutter: return "clutter";
  }
  return "?";
}

LabeledPointCloud LabeledPointCloud::select(const std::vector<std::size_t>& indices) const {
  LabeledPointCloud out;
  out.positions.reserve(indices.size());
  for (std::size_t i : indices) out.positions.push_back(positions[i]);
  if (colors) {
    out.colors.emplace();
    out.colors->reserve(indices.size());
    for (std::size_t i : indices) out.colors->push_back((*colors)[i]);
  }
  if (labels) {
    out.labels.emplace();
    out.labels->reserve(indices.size());
    for (std::size_t i : indices) out.labels->push_back((*labels)[i]);
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& why) {
  throw Error(ErrorKind::ParseError, path + ":" + std::to_string(line) + ": " + why);
}

SemanticClass label_from_int(long v, const std::string& path, std::size_t line) {
  if (v < 0 || v >= kNumSemanticClasses)
    throw Error(ErrorKind::OutOfRangeLabel,
                path + ":" + std::to_string(line) + ": label " + std::to_string(v) +
                    " outside [0, 5]");
  return static_cast<SemanticClass>(v);
}

LabeledPointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);

  LabeledPointCloud cloud;
  int ncols = -1;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    vals.clear();
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty()) {
      std::string rest;
      ss.clear();
      if (ss >> rest) parse_fail(path, lineno, "unparseable token '" + rest + "'");
      continue;
    }
    if (!ss.eof()) {
      std::string rest;
      ss.clear();
      ss >> rest;
      parse_fail(path, lineno, "unparseable token '" + rest + "'");
    }
    if (ncols < 0) {
      if (vals.size() != 3 && vals.size() != 4 && vals.size() != 6 && vals.size() != 7)
        parse_fail(path, lineno, "expected 3, 4, 6 or 7 columns, got " + std::to_string(vals.size()));
      ncols = static_cast<int>(vals.size());
      if (ncols == 6 || ncols == 7) cloud.colors.emplace();
      if (ncols == 4 || ncols == 7) cloud.labels.emplace();
    } else if (static_cast<int>(vals.size()) != ncols) {
      parse_fail(path, lineno,
                 "row has " + std::to_string(vals.size()) + " columns, expected " +
                     std::to_string(ncols));
    }
    if (!std::isfinite(vals[0]) || !std::isfinite(vals[1]) || !std::isfinite(vals[2]))
      parse_fail(path, lineno, "non-finite coordinate");
    cloud.positions.push_back({vals[0], vals[1], vals[2]});
    std::size_t at = 3;
    if (cloud.colors) {
      Color c;
      for (int k = 0; k < 3; ++k) {
        double cv = vals[at + k];
        if (!(cv >= 0.0 && cv <= 255.0)) parse_fail(path, lineno, "color outside [0, 255]");
        c[k] = static_cast<std::uint8_t>(std::lround(cv));
      }
      cloud.colors->push_back(c);
      at += 3;
    }
    if (cloud.labels)
      cloud.labels->push_back(label_from_int(std::lround(vals[at]), path, lineno));
  }
  return cloud;
}

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::I8: case PlyType::U8: return 1;
    case PlyType::I16: case PlyType::U16: return 2;
    case PlyType::I32: case PlyType::U32: case PlyType::F32: return 4;
    case PlyType::F64: return 8;
  }
  return 0;
}

bool ply_parse_type(const std::string& s, PlyType* out) {
  if (s == "char" || s == "int8") *out = PlyType::I8;
  else if (s == "uchar" || s == "uint8") *out = PlyType::U8;
  else if (s == "short" || s == "int16") *out = PlyType::I16;
  else if (s == "ushort" || s == "uint16") *out = PlyType::U16;
  else if (s == "int" || s == "int32") *out = PlyType::I32;
  else if (s == "uint" || s == "uint32") *out = PlyType::U32;
  else if (s == "float" || s == "float32") *out = PlyType::F32;
  else if (s == "double" || s == "float64") *out = PlyType::F64;
  else return false;
  return true;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::F32;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

double ply_read_binary_scalar(std::istream& in, PlyType t, const std::string& path) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_type_size(t)));
  if (!in)
    throw Error(ErrorKind::ParseError,
                path + ": truncated binary payload at byte " + std::to_string(in.tellg()));
  auto le = [&](int n) {
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  };
  switch (t) {
    case PlyType::I8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
    case PlyType::U8: return static_cast<double>(buf[0]);
    case PlyType::I16: return static_cast<double>(static_cast<std::int16_t>(le(2)));
    case PlyType::U16: return static_cast<double>(static_cast<std::uint16_t>(le(2)));
    case PlyType::I32: return static_cast<double>(static_cast<std::int32_t>(le(4)));
    case PlyType::U32: return static_cast<double>(static_cast<std::uint32_t>(le(4)));
    case PlyType::F32: {
      float f;
      std::uint32_t u = static_cast<std::uint32_t>(le(4));
      std::memcpy(&f, &u, 4);
      return f;
    }
    case PlyType::F64: {
      double d;
      std::uint64_t u = le(8);
      std::memcpy(&d, &u, 8);
      return d;
    }
  }
  return 0.0;
}

LabeledPointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);

  std::string line;
  std::size_t lineno = 0;
  auto next_header_line = [&]() {
    if (!std::getline(in, line)) parse_fail(path, lineno, "unexpected end of header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
  };

  next_header_line();
  if (line != "ply") parse_fail(path, lineno, "missing 'ply' magic");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    next_header_line();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw Error(ErrorKind::UnsupportedFormat, path + ": ply format '" + fmt + "'");
      have_format = true;
    } else if (tok == "element") {
      PlyElement el;
      ss >> el.name >> el.count;
      if (ss.fail()) parse_fail(path, lineno, "malformed element line");
      elements.push_back(el);
    } else if (tok == "property") {
      if (elements.empty()) parse_fail(path, lineno, "property before element");
      PlyProperty p;
      std::string t1;
      ss >> t1;
      if (t1 == "list") {
        std::string tc, tv;
        ss >> tc >> tv >> p.name;
        p.is_list = true;
      } else {
        if (!ply_parse_type(t1, &p.type)) parse_fail(path, lineno, "unknown type '" + t1 + "'");
        ss >> p.name;
      }
      if (ss.fail()) parse_fail(path, lineno, "malformed property line");
      elements.back().props.push_back(p);
    } else if (tok == "end_header") {
      break;
    } else {
      parse_fail(path, lineno, "unknown header keyword '" + tok + "'");
    }
  }
  if (!have_format) parse_fail(path, lineno, "header missing format line");

  LabeledPointCloud cloud;
  for (const PlyElement& el : elements) {
    if (el.name != "vertex") {
      // Skip foreign elements; lists have data-dependent size so give up there.
      for (const PlyProperty& p : el.props)
        if (p.is_list)
          throw Error(ErrorKind::UnsupportedFormat,
                      path + ": cannot skip list property in element '" + el.name + "'");
      if (binary) {
        std::size_t row = 0;
        for (const PlyProperty& p : el.props) row += ply_type_size(p.type);
        in.seekg(static_cast<std::streamoff>(row * el.count), std::ios::cur);
      } else {
        for (std::size_t i = 0; i < el.count; ++i) next_header_line();
      }
      continue;
    }

    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, ilabel = -1;
    for (std::size_t pi = 0; pi < el.props.size(); ++pi) {
      const PlyProperty& p = el.props[pi];
      if (p.is_list)
        throw Error(ErrorKind::UnsupportedFormat, path + ": list property on vertex");
      int i = static_cast<int>(pi);
      if (p.name == "x") ix = i;
      else if (p.name == "y") iy = i;
      else if (p.name == "z") iz = i;
      else if (p.name == "red") ir = i;
      else if (p.name == "green") ig = i;
      else if (p.name == "blue") ib = i;
      else if (p.name == "label" || p.name == "class" || p.name == "scalar_label") ilabel = i;
    }
    if (ix < 0 || iy < 0 || iz < 0)
      throw Error(ErrorKind::UnsupportedFormat, path + ": vertex element lacks x/y/z");
    bool has_rgb = ir >= 0 && ig >= 0 && ib >= 0;
    if (has_rgb) cloud.colors.emplace();
    if (ilabel >= 0) cloud.labels.emplace();

    cloud.positions.reserve(el.count);
    std::vector<double> row(el.props.size());
    for (std::size_t v = 0; v < el.count; ++v) {
      if (binary) {
        for (std::size_t pi = 0; pi < el.props.size(); ++pi)
          row[pi] = ply_read_binary_scalar(in, el.props[pi].type, path);
      } else {
        next_header_line();
        std::istringstream ss(line);
        for (std::size_t pi = 0; pi < el.props.size(); ++pi)
          if (!(ss >> row[pi])) parse_fail(path, lineno, "short vertex row");
      }
      double x = row[ix], y = row[iy], z = row[iz];
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        parse_fail(path, binary ? v : lineno,
                   binary ? "non-finite coordinate in vertex " + std::to_string(v)
                          : "non-finite coordinate");
      cloud.positions.push_back({x, y, z});
      if (has_rgb)
        cloud.colors->push_back({static_cast<std::uint8_t>(row[ir]),
                                 static_cast<std::uint8_t>(row[ig]),
                                 static_cast<std::uint8_t>(row[ib])});
      if (ilabel >= 0)
        cloud.labels->push_back(
            label_from_int(std::lround(row[ilabel]), path, binary ? v : lineno));
    }
  }
  return cloud;
}

}  // namespace

LabeledPointCloud load_point_cloud(const std::string& path, CloudFormat format) {
  switch (format) {
    case CloudFormat::Xyz: return load_xyz(path);
    case CloudFormat::PlyAscii:
    case CloudFormat::PlyBinaryLE: return load_ply(path);
  }
  throw Error(ErrorKind::UnsupportedFormat, "unknown format");
}

LabeledPointCloud load_point_cloud(const std::string& path) {
  auto dotpos = path.rfind('.');
  std::string ext = dotpos == std::string::npos ? "" : path.substr(dotpos + 1);
  if (ext == "xyz" || ext == "txt") return load_xyz(path);
  if (ext == "ply") return load_ply(path);
  throw Error(ErrorKind::UnsupportedFormat, path + ": unrecognized extension '" + ext + "'");
}

void save_point_cloud(const LabeledPointCloud& cloud, const std::string& path,
                      CloudFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out.precision(9);

  if (format == CloudFormat::Xyz) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3& p = cloud.positions[i];
      out << p.x << ' ' << p.y << ' ' << p.z;
      if (cloud.colors) {
        const Color& c = (*cloud.colors)[i];
        out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
      }
      if (cloud.labels) out << ' ' << int((*cloud.labels)[i]);
      out << '\n';
    }
    return;
  }

  bool binary = format == CloudFormat::PlyBinaryLE;
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.colors)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.labels) out << "property uchar label\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    if (binary) {
      double xyz[3] = {p.x, p.y, p.z};
      out.write(reinterpret_cast<const char*>(xyz), 24);
      if (cloud.colors)
        out.write(reinterpret_cast<const char*>((*cloud.colors)[i].data()), 3);
      if (cloud.labels) {
        std::uint8_t l = static_cast<std::uint8_t>((*cloud.labels)[i]);
        out.write(reinterpret_cast<const char*>(&l), 1);
      }
    } else {
      out << p.x << ' ' << p.y << ' ' << p.z;
      if (cloud.colors) {
        const Color& c = (*cloud.colors)[i];
        out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
      }
      if (cloud.labels) out << ' ' << int((*cloud.labels)[i]);
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace floorgen
