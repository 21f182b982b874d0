// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/octant_coder.hpp"

namespace sfls {

namespace {

int popcount_bucket(int parent_popcount) {
  if (parent_popcount <= 1) return 0;
  if (parent_popcount <= 3) return 1;
  return 2;
}

}  // namespace

int OctantCoder::context_index(int level, int parent_popcount, int group,
                               int prior_pattern) const {
  int idx = ((level * 8 + group) * 128 + prior_pattern) * kParentBuckets +
            popcount_bucket(parent_popcount);
  return idx;
}

void OctantCoder::encode(RangeEncoder& enc, int level, int parent_popcount,
                         uint8_t mask) {
  if (mask == 0)
    raise(ErrorCode::kInvalidArgument, "split node mask must be nonzero");
  int pattern = 0;
  for (int j = 0; j < 8; ++j) {
    int bit = (mask >> j) & 1;
    enc.encode_bit(models_[context_index(level, parent_popcount, j, pattern)],
                   bit);
    pattern |= bit << j;
  }
}

uint8_t OctantCoder::decode(RangeDecoder& dec, int level,
                            int parent_popcount) {
  int pattern = 0;
  for (int j = 0; j < 8; ++j) {
    int bit = dec.decode_bit(
        models_[context_index(level, parent_popcount, j, pattern)]);
    pattern |= bit << j;
  }
  if (pattern == 0)
    raise(ErrorCode::kCorruptStream, "decoded all-zero octant mask");
  return static_cast<uint8_t>(pattern);
}

double OctantCoder::estimate(int level, int parent_popcount,
                             uint8_t mask) const {
  double bits = 0.0;
  int pattern = 0;
  for (int j = 0; j < 8; ++j) {
    int bit = (mask >> j) & 1;
    bits += estimate_bits(
        models_[context_index(level, parent_popcount, j, pattern)], bit);
    pattern |= bit << j;
  }
  return bits;
}

void OctantCoder::adapt(int level, int parent_popcount, uint8_t mask) {
  int pattern = 0;
  for (int j = 0; j < 8; ++j) {
    int bit = (mask >> j) & 1;
    models_[context_index(level, parent_popcount, j, pattern)].update(bit);
    pattern |= bit << j;
  }
}

}  // namespace sfls
