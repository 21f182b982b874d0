// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/ply_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "sfls/error.hpp"

namespace sfls {

namespace {

constexpr double kIntegerTolerance = 1e-6;

enum class ScalarType { kFloat32, kFloat64, kInt32, kUInt8, kInt8, kUInt16, kInt16, kUInt32 };

size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::kFloat64:
      return 8;
    case ScalarType::kFloat32:
    case ScalarType::kInt32:
    case ScalarType::kUInt32:
      return 4;
    case ScalarType::kUInt16:
    case ScalarType::kInt16:
      return 2;
    default:
      return 1;
  }
}

bool parse_scalar_type(const std::string& name, ScalarType& out) {
  if (name == "float" || name == "float32") out = ScalarType::kFloat32;
  else if (name == "double" || name == "float64") out = ScalarType::kFloat64;
  else if (name == "int" || name == "int32") out = ScalarType::kInt32;
  else if (name == "uint" || name == "uint32") out = ScalarType::kUInt32;
  else if (name == "uchar" || name == "uint8") out = ScalarType::kUInt8;
  else if (name == "char" || name == "int8") out = ScalarType::kInt8;
  else if (name == "ushort" || name == "uint16") out = ScalarType::kUInt16;
  else if (name == "short" || name == "int16") out = ScalarType::kInt16;
  else return false;
  return true;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
};

struct Header {
  bool binary = false;
  size_t vertex_count = 0;
  std::vector<Property> vertex_properties;
  int xyz[3] = {-1, -1, -1};
  int comment_depth = -1;
  bool vertex_is_first_element = false;
};

Header parse_header(std::istream& in) {
  Header h;
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::kParse, "empty PLY file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") raise(ErrorCode::kParse, "missing 'ply' magic");

  bool have_format = false;
  bool in_vertex = false;
  bool seen_any_element = false;
  bool done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment") {
      std::string key;
      ls >> key;
      if (key == "depth") {
        int d = -1;
        if (ls >> d) h.comment_depth = d;
      }
    } else if (tok == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt == "ascii") h.binary = false;
      else if (fmt == "binary_little_endian") h.binary = true;
      else raise(ErrorCode::kParse, "unsupported PLY format: " + fmt);
      have_format = true;
    } else if (tok == "element") {
      std::string name;
      size_t count = 0;
      ls >> name >> count;
      in_vertex = (name == "vertex");
      if (in_vertex) {
        h.vertex_count = count;
        h.vertex_is_first_element = !seen_any_element;
      }
      seen_any_element = true;
    } else if (tok == "property") {
      if (!in_vertex) continue;
      std::string type_name;
      ls >> type_name;
      if (type_name == "list")
        raise(ErrorCode::kParse, "list property in vertex element is unsupported");
      Property p;
      if (!parse_scalar_type(type_name, p.type))
        raise(ErrorCode::kParse, "unknown property type: " + type_name);
      ls >> p.name;
      int idx = static_cast<int>(h.vertex_properties.size());
      if (p.name == "x") h.xyz[0] = idx;
      else if (p.name == "y") h.xyz[1] = idx;
      else if (p.name == "z") h.xyz[2] = idx;
      h.vertex_properties.push_back(p);
    } else if (tok == "end_header") {
      done = true;
      break;
    } else if (tok == "obj_info" || tok.empty()) {
      continue;
    } else {
      raise(ErrorCode::kParse, "unrecognized header line: " + line);
    }
  }
  if (!done) raise(ErrorCode::kParse, "missing end_header");
  if (!have_format) raise(ErrorCode::kParse, "missing format line");
  if (h.vertex_count == 0) raise(ErrorCode::kParse, "no vertex element");
  if (h.xyz[0] < 0 || h.xyz[1] < 0 || h.xyz[2] < 0)
    raise(ErrorCode::kParse, "vertex element lacks x, y, z properties");
  if (h.binary && !h.vertex_is_first_element)
    raise(ErrorCode::kParse, "binary PLY with vertex not first element is unsupported");
  return h;
}

uint32_t validate_coordinate(double v, int axis) {
  double r = std::nearbyint(v);
  if (std::abs(v - r) > kIntegerTolerance) {
    static const char* axes = "xyz";
    raise(ErrorCode::kParse, std::string("non-integer ") + axes[axis] +
                                 " coordinate (use explicit quantization)");
  }
  if (r < 0.0 || r > 65535.0)
    raise(ErrorCode::kRange, "coordinate outside [0, 2^16) voxel domain");
  return static_cast<uint32_t>(r);
}

double read_binary_scalar(const uint8_t* p, ScalarType t) {
  switch (t) {
    case ScalarType::kFloat32: {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
    case ScalarType::kFloat64: {
      double d;
      std::memcpy(&d, p, 8);
      return d;
    }
    case ScalarType::kInt32: {
      int32_t i;
      std::memcpy(&i, p, 4);
      return i;
    }
    case ScalarType::kUInt32: {
      uint32_t u;
      std::memcpy(&u, p, 4);
      return u;
    }
    case ScalarType::kUInt16: {
      uint16_t u;
      std::memcpy(&u, p, 2);
      return u;
    }
    case ScalarType::kInt16: {
      int16_t i;
      std::memcpy(&i, p, 2);
      return i;
    }
    case ScalarType::kUInt8:
      return *p;
    case ScalarType::kInt8:
      return *reinterpret_cast<const int8_t*>(p);
  }
  return 0.0;
}

}  // namespace

PointCloud load_ply(const std::string& path, int depth) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  Header h = parse_header(in);

  std::vector<Coord3> points;
  points.reserve(h.vertex_count);

  if (!h.binary) {
    std::string line;
    size_t parsed = 0;
    bool past_vertices = h.vertex_is_first_element;
    // Skip earlier elements' rows if vertex is not the first element.
    if (!past_vertices)
      raise(ErrorCode::kParse, "ascii PLY with vertex not first element is unsupported");
    while (parsed < h.vertex_count && std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream ls(line);
      double vals[3] = {0, 0, 0};
      double v;
      size_t col = 0, got = 0;
      while (ls >> v) {
        for (int a = 0; a < 3; ++a)
          if (static_cast<int>(col) == h.xyz[a]) {
            vals[a] = v;
            ++got;
          }
        ++col;
      }
      if (got != 3 || col < h.vertex_properties.size())
        raise(ErrorCode::kParse, "malformed vertex row");
      Coord3 c{validate_coordinate(vals[0], 0), validate_coordinate(vals[1], 1),
               validate_coordinate(vals[2], 2)};
      points.push_back(c);
      ++parsed;
    }
    if (parsed != h.vertex_count)
      raise(ErrorCode::kParse, "vertex count does not match body");
  } else {
    size_t stride = 0;
    size_t offsets[3] = {0, 0, 0};
    for (size_t i = 0; i < h.vertex_properties.size(); ++i) {
      for (int a = 0; a < 3; ++a)
        if (static_cast<int>(i) == h.xyz[a]) offsets[a] = stride;
      stride += scalar_size(h.vertex_properties[i].type);
    }
    std::vector<uint8_t> row(stride);
    for (size_t i = 0; i < h.vertex_count; ++i) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride));
      if (static_cast<size_t>(in.gcount()) != stride)
        raise(ErrorCode::kParse, "vertex count does not match body");
      double vals[3];
      for (int a = 0; a < 3; ++a)
        vals[a] = read_binary_scalar(row.data() + offsets[a],
                                     h.vertex_properties[h.xyz[a]].type);
      points.push_back({validate_coordinate(vals[0], 0),
                        validate_coordinate(vals[1], 1),
                        validate_coordinate(vals[2], 2)});
    }
  }

  if (points.empty()) raise(ErrorCode::kEmptyInput, "PLY contains no points");

  int d = depth;
  if (d < 0) d = h.comment_depth > 0 ? h.comment_depth : infer_depth(points);
  check_depth(d);
  uint32_t limit = 1u << d;
  for (const Coord3& p : points)
    if (p.x >= limit || p.y >= limit || p.z >= limit)
      raise(ErrorCode::kRange, "coordinate exceeds declared bit depth");
  return PointCloud::from_points(d, points);
}

void save_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << "ply\n"
      << "format ascii 1.0\n"
      << "comment depth " << cloud.depth() << "\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "end_header\n";
  for (uint64_t code : cloud.codes()) {
    Coord3 p = morton_decode(code, cloud.depth());
    out << p.x << " " << p.y << " " << p.z << "\n";
  }
  if (!out) raise(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace sfls
