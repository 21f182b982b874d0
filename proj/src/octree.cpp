// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/octree.hpp"

#include <algorithm>

namespace sfls {

OccupancyOctree OccupancyOctree::build(const PointCloud& cloud) {
  if (cloud.empty()) raise(ErrorCode::kEmptyInput, "cannot build octree from empty cloud");

  OccupancyOctree tree;
  tree.depth_ = cloud.depth();
  tree.leaves_ = cloud.codes();
  tree.levels_.resize(tree.depth_ + 1);

  for (int l = 1; l <= tree.depth_; ++l) {
    auto& nodes = tree.levels_[l];
    uint64_t prev = ~0ULL;
    for (uint64_t code : tree.leaves_) {
      uint64_t node_morton = code >> (3 * l);
      int octant = static_cast<int>((code >> (3 * (l - 1))) & 7);
      if (nodes.empty() || node_morton != prev) {
        nodes.push_back({node_morton, 0});
        prev = node_morton;
      }
      nodes.back().mask |= static_cast<uint8_t>(1u << octant);
    }
  }
  return tree;
}

const std::vector<LevelNode>& OccupancyOctree::level(int l) const {
  if (l < 1 || l > depth_)
    raise(ErrorCode::kInvalidArgument, "octree level out of range");
  return levels_[l];
}

size_t OccupancyOctree::node_count() const {
  size_t n = 0;
  for (int l = 1; l <= depth_; ++l) n += levels_[l].size();
  return n;
}

std::vector<uint8_t> OccupancyOctree::cell_occupancy(
    const NodeAddress& node) const {
  if (node.level < 1 || node.level > depth_)
    raise(ErrorCode::kDegenerateNode, "cell occupancy requires level >= 1");
  uint64_t base = node.morton << (3 * node.level);
  uint64_t count = 1ULL << (3 * node.level);

  std::vector<uint8_t> occ(count, 0);
  auto lo = std::lower_bound(leaves_.begin(), leaves_.end(), base);
  auto hi = std::lower_bound(lo, leaves_.end(), base + count);
  for (auto it = lo; it != hi; ++it) occ[*it - base] = 1;
  return occ;
}

size_t OccupancyOctree::occupied_count(const NodeAddress& node) const {
  uint64_t base = node.morton << (3 * node.level);
  uint64_t count = 1ULL << (3 * node.level);
  auto lo = std::lower_bound(leaves_.begin(), leaves_.end(), base);
  auto hi = std::lower_bound(lo, leaves_.end(), base + count);
  return static_cast<size_t>(hi - lo);
}

Coord3 node_origin(const NodeAddress& node, int depth) {
  if (node.level == depth) return {0, 0, 0};
  Coord3 cell = morton_decode(node.morton, depth - node.level);
  uint32_t s = 1u << node.level;
  return {cell.x * s, cell.y * s, cell.z * s};
}

std::vector<Coord3> node_voxels(const NodeAddress& node, int depth) {
  if (node.level < 1)
    raise(ErrorCode::kDegenerateNode, "node_voxels requires level >= 1");
  if (node.level > depth)
    raise(ErrorCode::kInvalidArgument, "node level exceeds depth");

  Coord3 origin = node_origin(node, depth);
  uint64_t count = 1ULL << (3 * node.level);
  std::vector<Coord3> out;
  out.reserve(count);
  for (uint64_t local = 0; local < count; ++local) {
    Coord3 c = morton_decode(local, node.level);
    out.push_back({origin.x + c.x, origin.y + c.y, origin.z + c.z});
  }
  return out;
}

}  // namespace sfls
