// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/point_cloud.hpp"

#include <algorithm>

namespace sfls {

PointCloud::PointCloud(int depth, std::vector<uint64_t> morton_codes)
    : depth_(depth), codes_(std::move(morton_codes)) {
  check_depth(depth);
  uint64_t limit = 1ULL << (3 * depth);
  for (uint64_t c : codes_)
    if (c >= limit) raise(ErrorCode::kRange, "morton code out of range");
  std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

PointCloud PointCloud::from_points(int depth,
                                   const std::vector<Coord3>& points) {
  std::vector<uint64_t> codes;
  codes.reserve(points.size());
  for (const Coord3& p : points)
    codes.push_back(morton_encode(p.x, p.y, p.z, depth));
  return PointCloud(depth, std::move(codes));
}

std::vector<Coord3> PointCloud::points() const {
  std::vector<Coord3> out;
  out.reserve(codes_.size());
  for (uint64_t c : codes_) out.push_back(morton_decode(c, depth_));
  return out;
}

int infer_depth(const std::vector<Coord3>& points) {
  uint32_t maxc = 0;
  for (const Coord3& p : points)
    maxc = std::max({maxc, p.x, p.y, p.z});
  int depth = 1;
  while (depth < kMaxDepth && (1u << depth) <= maxc) ++depth;
  return depth;
}

}  // namespace sfls
