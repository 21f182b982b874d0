// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "sfls/geometry.hpp"
#include "sfls/point_cloud.hpp"

namespace sfls {

inline constexpr double kPsnrCap = 999.0;

// Exact nearest-neighbor queries over integer points via a uniform cell
// grid. Ties are broken by ascending Morton code (= ascending point index,
// since clouds store points Morton-sorted), which keeps every metric
// bit-reproducible against a brute-force scan.
class GridIndex {
 public:
  explicit GridIndex(const PointCloud& cloud);

  size_t size() const { return points_.size(); }
  const Coord3& point(size_t i) const { return points_[i]; }

  // Index of the nearest point; ties by ascending index.
  size_t nearest(const Coord3& q) const;

  // The k nearest points (including an exact match), ordered by
  // (squared distance, index).
  std::vector<size_t> k_nearest(const Coord3& q, int k) const;

 private:
  static constexpr int kCellShift = 2;  // 4-voxel cells

  uint64_t cell_key(uint32_t cx, uint32_t cy, uint32_t cz) const {
    return (static_cast<uint64_t>(cx) << 42) |
           (static_cast<uint64_t>(cy) << 21) | cz;
  }

  std::vector<Coord3> points_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> cells_;
};

// Symmetric point-to-point PSNR: mse is the larger of the two directional
// means of squared nearest-neighbor distances, psnr = 10 log10(3 peak^2 /
// mse), capped at 999 dB when mse = 0.
double d1_psnr(const PointCloud& ref, const PointCloud& rec, double peak);

// Unit normal per point from the k-nearest-neighbor covariance, smallest
// eigenvector, sign canonicalized toward +z (ties toward +y, then +x).
std::vector<Vec3> estimate_normals(const PointCloud& cloud, int k = 9);

// Symmetric point-to-plane PSNR. Displacements are projected onto the
// reference-side normal of each pair: the source normal for ref->rec, the
// matched reference point's normal for rec->ref.
double d2_psnr(const PointCloud& ref, const std::vector<Vec3>& ref_normals,
               const PointCloud& rec, double peak);

struct RdPoint {
  double bpp = 0.0;
  double d1_db = 0.0;
  double d2_db = 0.0;
};

struct RdCurve {
  std::vector<RdPoint> points;  // ascending bpp
};

// Bjontegaard delta rate between two curves on the given quality column
// (0 = d1, 1 = d2): cubic fit of log rate over distortion, integrated across
// the overlapping dB range. Negative means `test` saves rate over `anchor`.
double bd_rate(const RdCurve& anchor, const RdCurve& test, int quality = 0);

std::string rd_curve_to_csv(const RdCurve& curve);

}  // namespace sfls
