// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sfls/range_coder.hpp"

namespace sfls {

// Context-adaptive coder for 8-bit octant occupancy masks. Each octant bit j
// is coded under a context built only from information the decoder already
// has: the level, the group index j, the occupancy pattern of octants < j
// within the same node, and a popcount bucket of the parent node's mask.
class OctantCoder {
 public:
  static constexpr int kParentBuckets = 3;  // popcount 1 / 2-3 / 4-8

  OctantCoder() : models_(17 * 8 * 128 * kParentBuckets) {}

  // Parent popcount for a node that has no parent (the root).
  static constexpr int kRootParentPopcount = 1;

  void encode(RangeEncoder& enc, int level, int parent_popcount,
              uint8_t mask);
  uint8_t decode(RangeDecoder& dec, int level, int parent_popcount);

  // Code length of `mask` under the current model states, in bits; models
  // are not mutated.
  double estimate(int level, int parent_popcount, uint8_t mask) const;

  // Adapts the models as encode would, without producing bits. Used for the
  // rate-model estimation pass.
  void adapt(int level, int parent_popcount, uint8_t mask);

 private:
  int context_index(int level, int parent_popcount, int group,
                    int prior_pattern) const;

  std::vector<AdaptiveBitModel> models_;
};

}  // namespace sfls
