// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace sfls {

// Adaptive binary probability estimator: 16-bit fixed-point P(bit = 1),
// exponential update p += (bit * 2^16 - p) >> shift, clamped so neither
// symbol ever becomes impossible.
struct AdaptiveBitModel {
  static constexpr uint32_t kOne = 1u << 16;
  static constexpr uint32_t kFloor = 32;

  uint32_t p1 = kOne / 2;
  int shift = 6;

  void update(int bit) {
    if (bit)
      p1 += (kOne - p1) >> shift;
    else
      p1 -= p1 >> shift;
    if (p1 < kFloor) p1 = kFloor;
    if (p1 > kOne - kFloor) p1 = kOne - kFloor;
  }

  double probability(int bit) const {
    double p = static_cast<double>(p1) / kOne;
    return bit ? p : 1.0 - p;
  }
};

// Ideal code length of `bit` under the model's current state, in bits.
// Does not mutate the model.
inline double estimate_bits(const AdaptiveBitModel& model, int bit) {
  return -std::log2(model.probability(bit));
}

}  // namespace sfls
