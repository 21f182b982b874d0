// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "sfls/synthetic.hpp"

using namespace sfls;

TEST_CASE("plane density") {
  PointCloud plane = generate_cloud(Shape::kPlane, 6, 1.0, 0);
  // One voxel per (x, y) column, minus any clamped boundary columns.
  CHECK(plane.size() <= 64 * 64);
  CHECK(plane.size() >= 64 * 64 - 2 * 64);
}

TEST_CASE("generation is deterministic") {
  PointCloud a = generate_cloud(Shape::kSphere, 6, 0.7, 42);
  PointCloud b = generate_cloud(Shape::kSphere, 6, 0.7, 42);
  CHECK(a == b);
  PointCloud c = generate_cloud(Shape::kSphere, 6, 0.7, 43);
  CHECK(a.codes() != c.codes());
}

TEST_CASE("sphere voxels sit on the analytic shell") {
  int depth = 8;
  PointCloud sphere = generate_cloud(Shape::kSphere, depth, 1.0, 0);
  double n = static_cast<double>(1 << depth);
  double c = 0.5 * n, r = 0.35 * n;
  for (const Coord3& p : sphere.points()) {
    double dx = p.x - c, dy = p.y - c, dz = p.z - c;
    double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    CHECK(std::abs(dist - r) <= 1.0);
  }
  CHECK(sphere.size() > 1000);
}

TEST_CASE("cube shell stays on the cube faces") {
  int depth = 6;
  PointCloud shell = generate_cloud(Shape::kCubeShell, depth, 1.0, 0);
  uint32_t n = 1u << depth;
  uint32_t a = n / 5, b = n - n / 5;
  for (const Coord3& p : shell.points()) {
    bool on_face = p.x == a || p.x == b || p.y == a || p.y == b || p.z == a ||
                   p.z == b;
    CHECK(on_face);
  }
}

TEST_CASE("density thins the cloud") {
  PointCloud full = generate_cloud(Shape::kPlane, 6, 1.0, 7);
  PointCloud half = generate_cloud(Shape::kPlane, 6, 0.5, 7);
  CHECK(half.size() < full.size());
  CHECK(half.size() > full.size() / 4);
  CHECK_THROWS_AS(generate_cloud(Shape::kPlane, 3, 1.0, 0), Error);
  CHECK_THROWS_AS(generate_cloud(Shape::kPlane, 6, 0.0, 0), Error);
}
