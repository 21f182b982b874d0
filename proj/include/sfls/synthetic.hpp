// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sfls/point_cloud.hpp"

namespace sfls {

enum class Shape { kPlane, kSphere, kCubeShell };

// Deterministic synthetic test clouds on a 2^depth grid:
//   plane      z = z0 + ax*x + ay*y, one voxel per (x, y) column
//   sphere     shell of voxels within half a voxel of a centered radius
//   cube-shell faces of an axis-aligned cube
// `density` keeps each voxel independently with the given probability,
// hashed from (seed, voxel), so generation order never matters.
PointCloud generate_cloud(Shape shape, int depth, double density,
                          uint64_t seed);

}  // namespace sfls
