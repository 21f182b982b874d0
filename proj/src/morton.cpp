// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/morton.hpp"

namespace sfls {

namespace {

// Spreads the low 16 bits of v so each lands at every third position.
uint64_t spread3(uint32_t v) {
  uint64_t x = v & 0xffff;
  x = (x | (x << 32)) & 0x00ff00000000ffffULL;
  x = (x | (x << 16)) & 0x00ff0000ff0000ffULL;
  x = (x | (x << 8)) & 0xf00f00f00f00f00fULL;
  x = (x | (x << 4)) & 0x30c30c30c30c30c3ULL;
  x = (x | (x << 2)) & 0x9249249249249249ULL;
  return x;
}

uint32_t compact3(uint64_t x) {
  x &= 0x9249249249249249ULL;
  x = (x | (x >> 2)) & 0x30c30c30c30c30c3ULL;
  x = (x | (x >> 4)) & 0xf00f00f00f00f00fULL;
  x = (x | (x >> 8)) & 0x00ff0000ff0000ffULL;
  x = (x | (x >> 16)) & 0x00ff00000000ffffULL;
  x = (x | (x >> 32)) & 0xffffULL;
  return static_cast<uint32_t>(x);
}

}  // namespace

uint64_t morton_encode(uint32_t x, uint32_t y, uint32_t z, int depth) {
  check_depth(depth);
  uint32_t limit = 1u << depth;
  if (x >= limit || y >= limit || z >= limit)
    raise(ErrorCode::kRange, "coordinate out of range for depth");
  return spread3(x) | (spread3(y) << 1) | (spread3(z) << 2);
}

Coord3 morton_decode(uint64_t code, int depth) {
  check_depth(depth);
  if (code >= (1ULL << (3 * depth)))
    raise(ErrorCode::kRange, "morton code out of range for depth");
  return {compact3(code), compact3(code >> 1), compact3(code >> 2)};
}

}  // namespace sfls
