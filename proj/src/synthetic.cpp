// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/synthetic.hpp"

#include <cmath>

#include "sfls/error.hpp"
#include "sfls/geometry.hpp"

namespace sfls {

namespace {

bool keep_voxel(uint64_t morton, uint64_t seed, double density) {
  if (density >= 1.0) return true;
  uint64_t h = splitmix64(morton ^ splitmix64(seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < density;
}

void gen_plane(int depth, std::vector<Coord3>& out) {
  uint32_t n = 1u << depth;
  double z0 = 0.35 * n;
  for (uint32_t x = 0; x < n; ++x) {
    for (uint32_t y = 0; y < n; ++y) {
      double z = z0 + 0.11 * x + 0.07 * y;
      int64_t zi = static_cast<int64_t>(std::nearbyint(z));
      if (zi < 0 || zi >= static_cast<int64_t>(n)) continue;
      out.push_back({x, y, static_cast<uint32_t>(zi)});
    }
  }
}

void gen_sphere(int depth, std::vector<Coord3>& out) {
  double n = static_cast<double>(1u << depth);
  double c = 0.5 * n;
  double radius = 0.35 * n;
  int64_t limit = 1 << depth;

  auto emit_near = [&](uint32_t x, uint32_t y, double zc) {
    int64_t z0 = static_cast<int64_t>(std::floor(zc)) - 2;
    for (int64_t z = z0; z <= z0 + 4; ++z) {
      if (z < 0 || z >= limit) continue;
      double dx = x - c, dy = y - c, dz = static_cast<double>(z) - c;
      double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (std::abs(dist - radius) <= 0.5)
        out.push_back({x, y, static_cast<uint32_t>(z)});
    }
  };

  int64_t lo = static_cast<int64_t>(std::floor(c - radius)) - 2;
  int64_t hi = static_cast<int64_t>(std::ceil(c + radius)) + 2;
  lo = std::max<int64_t>(lo, 0);
  hi = std::min<int64_t>(hi, limit - 1);
  for (int64_t x = lo; x <= hi; ++x) {
    for (int64_t y = lo; y <= hi; ++y) {
      double dx = x - c, dy = y - c;
      double rr = radius * radius - dx * dx - dy * dy;
      if (rr < -(2.0 * radius + 1.0)) continue;
      double s = std::sqrt(std::max(rr, 0.0));
      emit_near(static_cast<uint32_t>(x), static_cast<uint32_t>(y), c - s);
      emit_near(static_cast<uint32_t>(x), static_cast<uint32_t>(y), c + s);
    }
  }
}

void gen_cube_shell(int depth, std::vector<Coord3>& out) {
  uint32_t n = 1u << depth;
  uint32_t a = n / 5, b = n - n / 5;
  for (uint32_t u = a; u <= b; ++u) {
    for (uint32_t v = a; v <= b; ++v) {
      out.push_back({a, u, v});
      out.push_back({b, u, v});
      out.push_back({u, a, v});
      out.push_back({u, b, v});
      out.push_back({u, v, a});
      out.push_back({u, v, b});
    }
  }
}

}  // namespace

PointCloud generate_cloud(Shape shape, int depth, double density,
                          uint64_t seed) {
  if (depth < 4 || depth > 12)
    raise(ErrorCode::kInvalidArgument, "generator depth must be in [4, 12]");
  if (density <= 0.0 || density > 1.0)
    raise(ErrorCode::kInvalidArgument, "density must be in (0, 1]");

  std::vector<Coord3> voxels;
  switch (shape) {
    case Shape::kPlane:
      gen_plane(depth, voxels);
      break;
    case Shape::kSphere:
      gen_sphere(depth, voxels);
      break;
    case Shape::kCubeShell:
      gen_cube_shell(depth, voxels);
      break;
  }

  std::vector<uint64_t> codes;
  codes.reserve(voxels.size());
  for (const Coord3& v : voxels) {
    uint64_t m = morton_encode(v.x, v.y, v.z, depth);
    if (keep_voxel(m, seed, density)) codes.push_back(m);
  }
  if (codes.empty())
    raise(ErrorCode::kEmptyInput, "density produced an empty cloud");
  return PointCloud(depth, std::move(codes));
}

}  // namespace sfls
