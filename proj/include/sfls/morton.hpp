// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sfls/error.hpp"

namespace sfls {

inline constexpr int kMaxDepth = 16;

// Interleaved z-order code over `depth` levels. Within each level triple the
// x bit is least significant (octant index = x + 2y + 4z), most significant
// level first, so codes sort in the traversal order used everywhere else.
uint64_t morton_encode(uint32_t x, uint32_t y, uint32_t z, int depth);

struct Coord3 {
  uint32_t x = 0, y = 0, z = 0;
  bool operator==(const Coord3&) const = default;
};

Coord3 morton_decode(uint64_t code, int depth);

inline void check_depth(int depth) {
  if (depth < 1 || depth > kMaxDepth)
    raise(ErrorCode::kInvalidArgument, "bit depth must be in [1, 16]");
}

}  // namespace sfls
