// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sfls/range_coder.hpp"

using namespace sfls;

TEST_CASE("estimate_bits on fixed probabilities") {
  AdaptiveBitModel m;  // starts at 0.5
  CHECK(estimate_bits(m, 0) == doctest::Approx(1.0));
  CHECK(estimate_bits(m, 1) == doctest::Approx(1.0));

  AdaptiveBitModel quarter;
  quarter.p1 = AdaptiveBitModel::kOne / 4;  // P(1) = 0.25
  CHECK(estimate_bits(quarter, 1) == doctest::Approx(2.0));
}

TEST_CASE("round trip of random bits with fresh models") {
  std::mt19937_64 rng(31);
  std::vector<int> bits(10000);
  for (auto& b : bits) b = static_cast<int>(rng() & 1);

  RangeEncoder enc;
  AdaptiveBitModel enc_model;
  for (int b : bits) enc.encode_bit(enc_model, b);
  std::vector<uint8_t> stream = enc.finish();

  RangeDecoder dec(stream);
  AdaptiveBitModel dec_model;
  for (size_t i = 0; i < bits.size(); ++i)
    REQUIRE(dec.decode_bit(dec_model) == bits[i]);
  CHECK(dec_model.p1 == enc_model.p1);
}

TEST_CASE("model lockstep after every prefix") {
  std::mt19937_64 rng(32);
  std::vector<int> bits(2000);
  for (auto& b : bits) b = (rng() % 10) < 3 ? 1 : 0;

  // Trace encoder-side model states.
  std::vector<uint32_t> enc_states;
  RangeEncoder enc;
  AdaptiveBitModel em;
  for (int b : bits) {
    enc.encode_bit(em, b);
    enc_states.push_back(em.p1);
  }
  std::vector<uint8_t> stream = enc.finish();

  RangeDecoder dec(stream);
  AdaptiveBitModel dm;
  for (size_t i = 0; i < bits.size(); ++i) {
    dec.decode_bit(dm);
    CHECK(dm.p1 == enc_states[i]);
  }
}

TEST_CASE("adaptive coding approaches the Bernoulli(0.2) entropy bound") {
  std::mt19937_64 rng(33);
  const size_t n = 100000;
  std::vector<int> bits(n);
  for (auto& b : bits) b = (rng() % 5) == 0 ? 1 : 0;

  RangeEncoder enc;
  AdaptiveBitModel model;
  double estimated = 0.0;
  for (int b : bits) {
    estimated += estimate_bits(model, b);
    enc.encode_bit(model, b);
  }
  std::vector<uint8_t> stream = enc.finish();
  double realized = static_cast<double>(stream.size()) * 8.0;

  double entropy = -(0.2 * std::log2(0.2) + 0.8 * std::log2(0.8));
  double bound = entropy * static_cast<double>(n);  // ~72190 bits
  CHECK(realized < bound * 1.02);
  CHECK(realized > bound * 0.98);

  // Realized length tracks the sum of estimates along the same trajectory.
  CHECK(std::abs(realized - estimated) / estimated < 0.005);

  RangeDecoder dec(stream);
  AdaptiveBitModel dm;
  for (int b : bits) REQUIRE(dec.decode_bit(dm) == b);
}

TEST_CASE("a run of zero bits compresses hard") {
  RangeEncoder enc;
  AdaptiveBitModel model;
  for (int i = 0; i < 1000; ++i) enc.encode_bit(model, 0);
  std::vector<uint8_t> stream = enc.finish();
  CHECK(stream.size() * 8 < 120);

  RangeDecoder dec(stream);
  AdaptiveBitModel dm;
  for (int i = 0; i < 1000; ++i) REQUIRE(dec.decode_bit(dm) == 0);
}

TEST_CASE("model probability stays within its floor") {
  AdaptiveBitModel m;
  for (int i = 0; i < 100000; ++i) m.update(0);
  CHECK(m.p1 >= AdaptiveBitModel::kFloor);
  for (int i = 0; i < 100000; ++i) m.update(1);
  CHECK(m.p1 <= AdaptiveBitModel::kOne - AdaptiveBitModel::kFloor);
}

TEST_CASE("reading past the stream end is a truncation error") {
  RangeEncoder enc;
  AdaptiveBitModel m;
  for (int i = 0; i < 64; ++i) enc.encode_bit(m, i & 1);
  std::vector<uint8_t> stream = enc.finish();
  stream.resize(stream.size() / 2);

  CHECK_THROWS_AS(
      [&] {
        RangeDecoder dec(stream);
        AdaptiveBitModel dm;
        for (int i = 0; i < 64; ++i) dec.decode_bit(dm);
      }(),
      Error);
}

TEST_CASE("skewed fixed probabilities round trip") {
  std::mt19937_64 rng(34);
  std::vector<int> bits(5000);
  std::vector<uint32_t> probs(5000);
  for (size_t i = 0; i < bits.size(); ++i) {
    probs[i] = 32 + rng() % (AdaptiveBitModel::kOne - 64);
    bits[i] = static_cast<int>(rng() & 1);
  }
  RangeEncoder enc;
  for (size_t i = 0; i < bits.size(); ++i)
    enc.encode_with_probability(probs[i], bits[i]);
  std::vector<uint8_t> stream = enc.finish();
  RangeDecoder dec(stream);
  for (size_t i = 0; i < bits.size(); ++i)
    REQUIRE(dec.decode_with_probability(probs[i]) == bits[i]);
}
