// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "sfls/octant_coder.hpp"

using namespace sfls;

TEST_CASE("single octant mask round trips with fresh models") {
  RangeEncoder enc;
  OctantCoder ecoder;
  ecoder.encode(enc, 3, 4, 0x01);
  std::vector<uint8_t> stream = enc.finish();

  RangeDecoder dec(stream);
  OctantCoder dcoder;
  CHECK(dcoder.decode(dec, 3, 4) == 0x01);
}

TEST_CASE("random masks round trip across levels and contexts") {
  std::mt19937_64 rng(41);
  std::vector<std::tuple<int, int, uint8_t>> items;
  for (int i = 0; i < 5000; ++i) {
    int level = 1 + static_cast<int>(rng() % 10);
    int ppc = 1 + static_cast<int>(rng() % 8);
    uint8_t mask = static_cast<uint8_t>(1 + rng() % 255);
    items.emplace_back(level, ppc, mask);
  }

  RangeEncoder enc;
  OctantCoder ecoder;
  for (auto [l, p, m] : items) ecoder.encode(enc, l, p, m);
  std::vector<uint8_t> stream = enc.finish();

  RangeDecoder dec(stream);
  OctantCoder dcoder;
  for (auto [l, p, m] : items) REQUIRE(dcoder.decode(dec, l, p) == m);
}

TEST_CASE("context coding beats a context-free model on planar masks") {
  // Masks of a z = const plane through level-1 nodes: the lower four octants
  // occupied. Repeats with occasional variation, as a planar cloud yields.
  std::mt19937_64 rng(42);
  std::vector<uint8_t> masks;
  for (int i = 0; i < 10000; ++i) {
    uint8_t m = 0x0f;
    if (rng() % 8 == 0) m = static_cast<uint8_t>(0x0f ^ (1u << (rng() % 4)));
    masks.push_back(m);
  }

  RangeEncoder ctx_enc;
  OctantCoder ctx_coder;
  for (uint8_t m : masks) ctx_coder.encode(ctx_enc, 1, 4, m);
  size_t ctx_bytes = ctx_enc.finish().size();

  // Context-free: a single adaptive model for all octant bits.
  RangeEncoder flat_enc;
  AdaptiveBitModel flat;
  for (uint8_t m : masks)
    for (int j = 0; j < 8; ++j) flat_enc.encode_bit(flat, (m >> j) & 1);
  size_t flat_bytes = flat_enc.finish().size();

  CHECK(ctx_bytes < flat_bytes);
}

TEST_CASE("repeated full masks converge below one bit per node") {
  RangeEncoder enc;
  OctantCoder coder;
  const int n = 4000;
  for (int i = 0; i < n; ++i) coder.encode(enc, 2, 8, 0xff);
  size_t bytes = enc.finish().size();
  CHECK(static_cast<double>(bytes) * 8.0 / n < 1.0);
}

TEST_CASE("estimate matches realized size along the trajectory") {
  std::mt19937_64 rng(43);
  RangeEncoder enc;
  OctantCoder coder;
  double estimated = 0.0;
  for (int i = 0; i < 20000; ++i) {
    int level = 1 + static_cast<int>(rng() % 6);
    int ppc = 1 + static_cast<int>(rng() % 8);
    uint8_t mask = static_cast<uint8_t>(1 + rng() % 255);
    estimated += coder.estimate(level, ppc, mask);
    coder.encode(enc, level, ppc, mask);
  }
  double realized = static_cast<double>(enc.finish().size()) * 8.0;
  CHECK(std::abs(realized - estimated) / estimated < 0.005);
}

TEST_CASE("adapt mirrors encode-side model updates") {
  std::mt19937_64 rng(44);
  std::vector<std::tuple<int, int, uint8_t>> items;
  for (int i = 0; i < 300; ++i)
    items.emplace_back(1 + static_cast<int>(rng() % 4),
                       1 + static_cast<int>(rng() % 8),
                       static_cast<uint8_t>(1 + rng() % 255));

  RangeEncoder enc;
  OctantCoder via_encode;
  OctantCoder via_adapt;
  for (auto [l, p, m] : items) {
    via_encode.encode(enc, l, p, m);
    via_adapt.adapt(l, p, m);
  }
  enc.finish();
  // Same estimates afterwards => identical model states on the used paths.
  std::mt19937_64 probe(45);
  for (int i = 0; i < 200; ++i) {
    int l = 1 + static_cast<int>(probe() % 4);
    int p = 1 + static_cast<int>(probe() % 8);
    uint8_t m = static_cast<uint8_t>(1 + probe() % 255);
    CHECK(via_encode.estimate(l, p, m) == via_adapt.estimate(l, p, m));
  }
}

TEST_CASE("an all-zero mask cannot be encoded and is corrupt to decode") {
  RangeEncoder enc;
  OctantCoder coder;
  CHECK_THROWS_AS(coder.encode(enc, 1, 1, 0), Error);
}
