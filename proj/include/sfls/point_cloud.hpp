// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sfls/morton.hpp"

namespace sfls {

// A voxelized point set: integer coordinates below 2^depth per axis, stored
// deduplicated as Morton codes in ascending order.
class PointCloud {
 public:
  PointCloud() = default;

  // Points may be unsorted and contain duplicates; both are normalized here.
  PointCloud(int depth, std::vector<uint64_t> morton_codes);

  static PointCloud from_points(int depth, const std::vector<Coord3>& points);

  int depth() const { return depth_; }
  size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }

  const std::vector<uint64_t>& codes() const { return codes_; }
  Coord3 point(size_t i) const { return morton_decode(codes_[i], depth_); }
  std::vector<Coord3> points() const;

  bool operator==(const PointCloud&) const = default;

 private:
  int depth_ = 1;
  std::vector<uint64_t> codes_;
};

// Smallest depth whose grid contains all coordinates (at least 1).
int infer_depth(const std::vector<Coord3>& points);

}  // namespace sfls
