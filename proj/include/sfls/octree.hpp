// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sfls/point_cloud.hpp"

namespace sfls {

// Identifies an octree cell of side length 2^level; `morton` interleaves the
// cell coordinates over the remaining depth - level levels.
struct NodeAddress {
  int level = 0;
  uint64_t morton = 0;
  bool operator==(const NodeAddress&) const = default;
};

struct LevelNode {
  uint64_t morton = 0;
  uint8_t mask = 0;  // octant occupancy, bit j = Morton octant j
};

// Occupancy octree over a voxelized cloud. Levels run from `depth` (the root,
// a single cell covering the grid) down to 0 (individual voxels). Nodes at
// levels [1, depth] carry octant masks; level-0 occupancy is the cloud itself.
class OccupancyOctree {
 public:
  static OccupancyOctree build(const PointCloud& cloud);

  int depth() const { return depth_; }

  // Nodes of level l in ascending Morton order, l in [1, depth].
  const std::vector<LevelNode>& level(int l) const;

  const std::vector<uint64_t>& leaf_codes() const { return leaves_; }

  // Total number of mask-bearing nodes (levels 1..depth).
  size_t node_count() const;

  // Occupancy bit per voxel of the node's cell, indexed by local Morton code
  // (8^level entries). Level must be >= 1.
  std::vector<uint8_t> cell_occupancy(const NodeAddress& node) const;

  // Number of cloud points inside the node's cell.
  size_t occupied_count(const NodeAddress& node) const;

 private:
  int depth_ = 1;
  std::vector<uint64_t> leaves_;
  std::vector<std::vector<LevelNode>> levels_;  // levels_[l], l in [1, depth]
};

// All 8^level voxel coordinates of the node's cell in ascending global
// Morton order. Level must be >= 1 (a level-0 cell is a single voxel and
// carries no surfel).
std::vector<Coord3> node_voxels(const NodeAddress& node, int depth);

// Origin (minimum corner) of the node's cell in voxel coordinates.
Coord3 node_origin(const NodeAddress& node, int depth);

}  // namespace sfls
