// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sfls {

void symmetric_eigen3(const Mat3& a, Vec3& values, Mat3& vectors) {
  Mat3 d = a;
  Mat3 v = Mat3::identity();

  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(d(0, 1)) + std::abs(d(0, 2)) + std::abs(d(1, 2));
    if (off < 1e-15) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        double apq = d(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < 3; ++k) {
          double dkp = d(k, p), dkq = d(k, q);
          d(k, p) = c * dkp - s * dkq;
          d(k, q) = s * dkp + c * dkq;
        }
        for (int k = 0; k < 3; ++k) {
          double dpk = d(p, k), dqk = d(q, k);
          d(p, k) = c * dpk - s * dqk;
          d(q, k) = s * dpk + c * dqk;
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  Vec3 eig = {d(0, 0), d(1, 1), d(2, 2)};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return eig[i] > eig[j]; });

  for (int c = 0; c < 3; ++c) {
    values[c] = eig[order[c]];
    for (int r = 0; r < 3; ++r) vectors(r, c) = v(r, order[c]);
  }
}

}  // namespace sfls
