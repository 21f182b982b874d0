// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sfls/error.hpp"

namespace sfls {

namespace {

int64_t squared_distance(const Coord3& a, const Coord3& b) {
  int64_t dx = static_cast<int64_t>(a.x) - b.x;
  int64_t dy = static_cast<int64_t>(a.y) - b.y;
  int64_t dz = static_cast<int64_t>(a.z) - b.z;
  return dx * dx + dy * dy + dz * dz;
}

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return kPsnrCap;
  double v = 10.0 * std::log10(3.0 * peak * peak / mse);
  return std::min(v, kPsnrCap);
}

}  // namespace

GridIndex::GridIndex(const PointCloud& cloud) : points_(cloud.points()) {
  for (uint32_t i = 0; i < points_.size(); ++i) {
    const Coord3& p = points_[i];
    cells_[cell_key(p.x >> kCellShift, p.y >> kCellShift, p.z >> kCellShift)]
        .push_back(i);
  }
}

size_t GridIndex::nearest(const Coord3& q) const {
  const int64_t w = 1 << kCellShift;
  int64_t qcx = q.x >> kCellShift, qcy = q.y >> kCellShift,
          qcz = q.z >> kCellShift;

  int64_t best_d2 = -1;
  uint32_t best_i = 0;
  for (int64_t s = 0;; ++s) {
    // Scan the Chebyshev shell of cell radius s.
    for (int64_t cx = qcx - s; cx <= qcx + s; ++cx) {
      if (cx < 0) continue;
      for (int64_t cy = qcy - s; cy <= qcy + s; ++cy) {
        if (cy < 0) continue;
        bool edge_xy =
            (cx == qcx - s || cx == qcx + s || cy == qcy - s || cy == qcy + s);
        int64_t step = edge_xy ? 1 : 2 * s;
        if (step == 0) step = 1;
        for (int64_t cz = qcz - s; cz <= qcz + s; cz += step) {
          if (cz < 0) continue;
          auto it = cells_.find(cell_key(static_cast<uint32_t>(cx),
                                         static_cast<uint32_t>(cy),
                                         static_cast<uint32_t>(cz)));
          if (it == cells_.end()) continue;
          for (uint32_t i : it->second) {
            int64_t d2 = squared_distance(q, points_[i]);
            if (best_d2 < 0 || d2 < best_d2 ||
                (d2 == best_d2 && i < best_i)) {
              best_d2 = d2;
              best_i = i;
            }
          }
        }
      }
    }
    if (best_d2 >= 0) {
      // Anything in shell s+1 or beyond is at least s*w + 1 away, so it can
      // neither beat nor tie the current best.
      int64_t bound = s * w + 1;
      if (bound * bound > best_d2) break;
    }
  }
  return best_i;
}

std::vector<size_t> GridIndex::k_nearest(const Coord3& q, int k) const {
  const int64_t w = 1 << kCellShift;
  int64_t qcx = q.x >> kCellShift, qcy = q.y >> kCellShift,
          qcz = q.z >> kCellShift;

  // (d2, index) pairs, kept as a sorted small set; k is small (normals use 9).
  std::vector<std::pair<int64_t, uint32_t>> best;
  best.reserve(k + 1);

  for (int64_t s = 0;; ++s) {
    for (int64_t cx = qcx - s; cx <= qcx + s; ++cx) {
      if (cx < 0) continue;
      for (int64_t cy = qcy - s; cy <= qcy + s; ++cy) {
        if (cy < 0) continue;
        bool edge_xy =
            (cx == qcx - s || cx == qcx + s || cy == qcy - s || cy == qcy + s);
        int64_t step = edge_xy ? 1 : 2 * s;
        if (step == 0) step = 1;
        for (int64_t cz = qcz - s; cz <= qcz + s; cz += step) {
          if (cz < 0) continue;
          auto it = cells_.find(cell_key(static_cast<uint32_t>(cx),
                                         static_cast<uint32_t>(cy),
                                         static_cast<uint32_t>(cz)));
          if (it == cells_.end()) continue;
          for (uint32_t i : it->second) {
            std::pair<int64_t, uint32_t> entry{squared_distance(q, points_[i]),
                                               i};
            if (best.size() == static_cast<size_t>(k) && entry >= best.back())
              continue;
            best.insert(std::lower_bound(best.begin(), best.end(), entry),
                        entry);
            if (best.size() > static_cast<size_t>(k)) best.pop_back();
          }
        }
      }
    }
    if (best.size() == static_cast<size_t>(k)) {
      int64_t bound = s * w + 1;
      if (bound * bound > best.back().first) break;
    }
  }

  std::vector<size_t> out;
  out.reserve(best.size());
  for (const auto& e : best) out.push_back(e.second);
  return out;
}

double d1_psnr(const PointCloud& ref, const PointCloud& rec, double peak) {
  if (ref.empty() || rec.empty())
    raise(ErrorCode::kEmptyInput, "empty cloud in d1_psnr");
  if (peak <= 0.0) raise(ErrorCode::kInvalidArgument, "peak must be positive");

  GridIndex ref_index(ref), rec_index(rec);
  double sum_ab = 0.0, sum_ba = 0.0;
  for (size_t i = 0; i < ref_index.size(); ++i) {
    const Coord3& a = ref_index.point(i);
    sum_ab += static_cast<double>(
        squared_distance(a, rec_index.point(rec_index.nearest(a))));
  }
  for (size_t i = 0; i < rec_index.size(); ++i) {
    const Coord3& b = rec_index.point(i);
    sum_ba += static_cast<double>(
        squared_distance(b, ref_index.point(ref_index.nearest(b))));
  }
  double mse = std::max(sum_ab / static_cast<double>(ref.size()),
                        sum_ba / static_cast<double>(rec.size()));
  return psnr_from_mse(mse, peak);
}

std::vector<Vec3> estimate_normals(const PointCloud& cloud, int k) {
  if (k < 3) raise(ErrorCode::kInvalidArgument, "k must be >= 3");
  if (cloud.size() < static_cast<size_t>(k))
    raise(ErrorCode::kInvalidArgument, "cloud smaller than neighborhood");

  GridIndex index(cloud);
  std::vector<Vec3> normals(index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    std::vector<size_t> nn = index.k_nearest(index.point(i), k);
    Vec3 mean{};
    for (size_t j : nn) {
      const Coord3& p = index.point(j);
      mean += Vec3{static_cast<double>(p.x), static_cast<double>(p.y),
                   static_cast<double>(p.z)};
    }
    mean = mean * (1.0 / static_cast<double>(nn.size()));
    Mat3 cov{};
    for (size_t j : nn) {
      const Coord3& p = index.point(j);
      Vec3 d = Vec3{static_cast<double>(p.x), static_cast<double>(p.y),
                    static_cast<double>(p.z)} -
               mean;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cov(r, c) += d[r] * d[c];
    }

    Vec3 n{0.0, 0.0, 1.0};
    double trace = cov(0, 0) + cov(1, 1) + cov(2, 2);
    if (trace > 1e-12) {
      Vec3 eig;
      Mat3 vecs;
      symmetric_eigen3(cov, eig, vecs);
      n = {vecs(0, 2), vecs(1, 2), vecs(2, 2)};  // smallest eigenvalue
      double len = norm(n);
      if (len < 1e-12) {
        n = {0.0, 0.0, 1.0};
      } else {
        n = n * (1.0 / len);
        if (n.z < 0.0 || (n.z == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0))))
          n = n * -1.0;
      }
    }
    normals[i] = n;
  }
  return normals;
}

double d2_psnr(const PointCloud& ref, const std::vector<Vec3>& ref_normals,
               const PointCloud& rec, double peak) {
  if (ref.empty() || rec.empty())
    raise(ErrorCode::kEmptyInput, "empty cloud in d2_psnr");
  if (ref_normals.size() != ref.size())
    raise(ErrorCode::kInvalidArgument, "one normal per reference point required");
  if (peak <= 0.0) raise(ErrorCode::kInvalidArgument, "peak must be positive");

  GridIndex ref_index(ref), rec_index(rec);
  double sum_ab = 0.0, sum_ba = 0.0;
  for (size_t i = 0; i < ref_index.size(); ++i) {
    const Coord3& a = ref_index.point(i);
    const Coord3& b = rec_index.point(rec_index.nearest(a));
    Vec3 e = {static_cast<double>(a.x) - b.x, static_cast<double>(a.y) - b.y,
              static_cast<double>(a.z) - b.z};
    double proj = dot(e, ref_normals[i]);
    sum_ab += proj * proj;
  }
  for (size_t i = 0; i < rec_index.size(); ++i) {
    const Coord3& b = rec_index.point(i);
    size_t j = ref_index.nearest(b);
    const Coord3& a = ref_index.point(j);
    Vec3 e = {static_cast<double>(b.x) - a.x, static_cast<double>(b.y) - a.y,
              static_cast<double>(b.z) - a.z};
    double proj = dot(e, ref_normals[j]);
    sum_ba += proj * proj;
  }
  double mse = std::max(sum_ab / static_cast<double>(ref.size()),
                        sum_ba / static_cast<double>(rec.size()));
  return psnr_from_mse(mse, peak);
}

namespace {

// Least-squares cubic through (x, y), x pre-centered by the caller.
std::array<double, 4> fit_cubic(const std::vector<double>& x,
                                const std::vector<double>& y) {
  double a[4][5] = {};
  for (size_t i = 0; i < x.size(); ++i) {
    double pw[7] = {1, 0, 0, 0, 0, 0, 0};
    for (int p = 1; p <= 6; ++p) pw[p] = pw[p - 1] * x[i];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] += pw[r + c];
      a[r][4] += pw[r] * y[i];
    }
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    if (std::abs(a[col][col]) < 1e-12)
      raise(ErrorCode::kInvalidArgument, "degenerate rd curve for BD fit");
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2],
          a[3][4] / a[3][3]};
}

double integrate_cubic(const std::array<double, 4>& c, double lo, double hi) {
  auto prim = [&](double v) {
    return c[0] * v + c[1] * v * v / 2.0 + c[2] * v * v * v / 3.0 +
           c[3] * v * v * v * v / 4.0;
  };
  return prim(hi) - prim(lo);
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test, int quality) {
  if (anchor.points.size() < 4 || test.points.size() < 4)
    raise(ErrorCode::kInvalidArgument, "BD-rate needs at least 4 points per curve");

  auto extract = [&](const RdCurve& curve, std::vector<double>& d,
                     std::vector<double>& r) {
    for (const RdPoint& p : curve.points) {
      if (p.bpp <= 0.0)
        raise(ErrorCode::kInvalidArgument, "nonpositive bpp in rd curve");
      d.push_back(quality == 0 ? p.d1_db : p.d2_db);
      r.push_back(std::log(p.bpp));
    }
  };
  std::vector<double> da, ra, dt, rt;
  extract(anchor, da, ra);
  extract(test, dt, rt);

  double lo = std::max(*std::min_element(da.begin(), da.end()),
                       *std::min_element(dt.begin(), dt.end()));
  double hi = std::min(*std::max_element(da.begin(), da.end()),
                       *std::max_element(dt.begin(), dt.end()));
  if (hi <= lo)
    raise(ErrorCode::kInvalidArgument, "rd curves do not overlap in quality");

  // Center the quality axis to keep the cubic fit well conditioned.
  double center = (lo + hi) / 2.0;
  for (double& v : da) v -= center;
  for (double& v : dt) v -= center;

  std::array<double, 4> ca = fit_cubic(da, ra);
  std::array<double, 4> ct = fit_cubic(dt, rt);
  double avg = (integrate_cubic(ct, lo - center, hi - center) -
                integrate_cubic(ca, lo - center, hi - center)) /
               (hi - lo);
  return 100.0 * (std::exp(avg) - 1.0);
}

std::string rd_curve_to_csv(const RdCurve& curve) {
  std::string out = "bpp,d1_db,d2_db\n";
  char row[128];
  for (const RdPoint& p : curve.points) {
    std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f\n", p.bpp, p.d1_db,
                  p.d2_db);
    out += row;
  }
  return out;
}

}  // namespace sfls
