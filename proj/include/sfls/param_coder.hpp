// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sfls/range_coder.hpp"
#include "sfls/surfel.hpp"

namespace sfls {

// Uniform scalar quantizer for the 11 surfel parameters. mu, log-sigma and
// log-beta use bin-center (mid-rise) bins; quaternion components use a
// mid-tread grid over [-1, 1] with an odd level count so 0 and +-1 are
// exactly representable. Ranges for mu and sigma scale with the node level.
struct ParamQuantizer {
  int mu_bits = 7;
  int sigma_bits = 6;
  int quat_bits = 8;
  int beta_bits = 5;

  int total_bits() const {
    return 3 * mu_bits + 3 * sigma_bits + 4 * quat_bits + beta_bits;
  }

  bool operator==(const ParamQuantizer&) const = default;
};

struct QuantizedParams {
  std::array<uint16_t, 3> mu{};
  std::array<uint16_t, 3> log_sigma{};
  std::array<uint16_t, 4> quat{};
  uint16_t beta = 0;
  bool operator==(const QuantizedParams&) const = default;
};

// `clamped`, when given, counts components that fell outside the declared
// range and were clamped.
QuantizedParams quantize_params(const SurfelParams& params, int level,
                                const ParamQuantizer& quantizer,
                                int* clamped = nullptr);

// Inverse map; the quaternion is renormalized after dequantization.
// quantize_params(dequantize_params(t)) == t for any in-range tuple.
SurfelParams dequantize_params(const QuantizedParams& tuple, int level,
                               const ParamQuantizer& quantizer);

// Bitwise coder for quantized tuples: one adaptive model per
// (level, field, bit position), most significant bit first.
class ParamCoder {
 public:
  explicit ParamCoder(const ParamQuantizer& quantizer);

  void encode(RangeEncoder& enc, int level, const QuantizedParams& tuple);
  QuantizedParams decode(RangeDecoder& dec, int level);
  double estimate(int level, const QuantizedParams& tuple) const;
  void adapt(int level, const QuantizedParams& tuple);

  const ParamQuantizer& quantizer() const { return quant_; }

 private:
  static constexpr int kFields = 11;
  static constexpr int kMaxFieldBits = 16;

  int model_index(int level, int field, int bit) const {
    return (level * kFields + field) * kMaxFieldBits + bit;
  }

  ParamQuantizer quant_;
  std::vector<AdaptiveBitModel> models_;
};

}  // namespace sfls
