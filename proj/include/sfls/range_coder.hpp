// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfls/bit_model.hpp"
#include "sfls/error.hpp"

namespace sfls {

// Binary range coder: 32-bit range, 64-bit low accumulator with carry
// propagation through a byte cache, byte-wise renormalization keeping
// range >= 2^24. Encoder and decoder walk bit-identical interval splits, so
// model state stays in lockstep as long as both sides code the same
// (probability, symbol) sequence.
class RangeEncoder {
 public:
  void encode_bit(AdaptiveBitModel& model, int bit) {
    encode_with_probability(model.p1, bit);
    model.update(bit);
  }

  // Codes `bit` under a fixed probability of one (16-bit fixed point).
  void encode_with_probability(uint32_t p1, int bit) {
    uint32_t split =
        static_cast<uint32_t>((static_cast<uint64_t>(range_) * p1) >> 16);
    if (bit) {
      range_ = split;
    } else {
      low_ += split;
      range_ -= split;
    }
    while (range_ < (1u << 24)) {
      range_ <<= 8;
      shift_low();
    }
  }

  // Flushes the final interval; the coder must not be used afterwards.
  std::vector<uint8_t> finish() {
    for (int i = 0; i < 5; ++i) shift_low();
    // Drain deferred bytes so the decoder can always read its lookahead.
    // No carry can reach them: low is fully shifted out by now.
    while (cache_count_ > 0) {
      bytes_.push_back(cache_);
      cache_ = 0xff;
      --cache_count_;
    }
    return std::move(bytes_);
  }

  size_t bytes_written() const { return bytes_.size() + cache_count_; }

 private:
  void shift_low() {
    if (low_ < 0xff000000ULL || low_ > 0xffffffffULL) {
      uint8_t carry = static_cast<uint8_t>(low_ >> 32);
      bytes_.push_back(static_cast<uint8_t>(cache_ + carry));
      for (uint64_t i = 1; i < cache_count_; ++i)
        bytes_.push_back(static_cast<uint8_t>(0xff + carry));
      cache_count_ = 0;
      cache_ = static_cast<uint8_t>(low_ >> 24);
    }
    ++cache_count_;
    low_ = (low_ << 8) & 0xffffffffULL;
  }

  std::vector<uint8_t> bytes_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xffffffffu;
  uint8_t cache_ = 0;
  uint64_t cache_count_ = 1;  // leading cache byte, as in carry-cached coders
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> bytes) : bytes_(bytes) {
    // The first byte is the encoder's initial zero cache byte.
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
  }

  int decode_bit(AdaptiveBitModel& model) {
    int bit = decode_with_probability(model.p1);
    model.update(bit);
    return bit;
  }

  int decode_with_probability(uint32_t p1) {
    uint32_t split =
        static_cast<uint32_t>((static_cast<uint64_t>(range_) * p1) >> 16);
    int bit;
    if (code_ < split) {
      bit = 1;
      range_ = split;
    } else {
      bit = 0;
      code_ -= split;
      range_ -= split;
    }
    while (range_ < (1u << 24)) {
      range_ <<= 8;
      code_ = (code_ << 8) | next_byte();
    }
    return bit;
  }

  size_t bytes_read() const { return pos_; }

 private:
  uint8_t next_byte() {
    if (pos_ >= bytes_.size())
      raise(ErrorCode::kTruncatedStream, "range decoder read past stream end");
    return bytes_[pos_++];
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  uint32_t range_ = 0xffffffffu;
  uint32_t code_ = 0;
};

}  // namespace sfls
