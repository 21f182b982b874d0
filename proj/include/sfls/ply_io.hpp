// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "sfls/point_cloud.hpp"

namespace sfls {

// Reads a PLY point cloud (ascii or binary_little_endian, vertex properties
// x,y,z as float32/float64/int32). Coordinates must be integer-valued within
// 1e-6; duplicates are dropped. If depth < 0 it is taken from a
// "comment depth N" header line when present, else inferred from the data.
PointCloud load_ply(const std::string& path, int depth = -1);

// Writes ascii PLY with float x,y,z properties (integer-valued) and a
// "comment depth N" line so the bit depth survives a round trip.
void save_ply(const PointCloud& cloud, const std::string& path);

}  // namespace sfls
