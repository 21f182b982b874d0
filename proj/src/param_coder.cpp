// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/param_coder.hpp"

#include <cmath>

#include "sfls/error.hpp"

namespace sfls {

namespace {

// Bin-center quantization: k = floor(v / step), dequantized at (k + 0.5) step.
uint16_t quantize_mid_rise(double v, double lo, double hi, int bits,
                           int* clamped) {
  double step = (hi - lo) / static_cast<double>(1 << bits);
  double t = std::floor((v - lo) / step);
  if (t < 0.0 || t > static_cast<double>((1 << bits) - 1)) {
    if (clamped) ++*clamped;
    t = std::min(std::max(t, 0.0), static_cast<double>((1 << bits) - 1));
  }
  return static_cast<uint16_t>(t);
}

double dequantize_mid_rise(uint16_t k, double lo, double hi, int bits) {
  double step = (hi - lo) / static_cast<double>(1 << bits);
  return lo + (static_cast<double>(k) + 0.5) * step;
}

// Mid-tread over [-1, 1] with 2^bits - 1 levels: 0 and +-1 are exact.
uint16_t quantize_quat_component(double v, int bits, int* clamped) {
  int levels = (1 << bits) - 1;
  double step = 2.0 / static_cast<double>(levels - 1);
  double t = std::nearbyint((v + 1.0) / step);
  if (t < 0.0 || t > static_cast<double>(levels - 1)) {
    if (clamped) ++*clamped;
    t = std::min(std::max(t, 0.0), static_cast<double>(levels - 1));
  }
  return static_cast<uint16_t>(t);
}

double dequantize_quat_component(uint16_t k, int bits) {
  int levels = (1 << bits) - 1;
  double step = 2.0 / static_cast<double>(levels - 1);
  return -1.0 + static_cast<double>(k) * step;
}

Quaternion canonical_sign(const Quaternion& q) {
  double c[4] = {q.w, q.x, q.y, q.z};
  for (int i = 0; i < 4; ++i) {
    if (c[i] > 0.0) break;
    if (c[i] < 0.0) return {-q.w, -q.x, -q.y, -q.z};
  }
  return q;
}

struct FieldLayout {
  int bits[11];
  void init(const ParamQuantizer& q) {
    for (int i = 0; i < 3; ++i) bits[i] = q.mu_bits;
    for (int i = 3; i < 6; ++i) bits[i] = q.sigma_bits;
    for (int i = 6; i < 10; ++i) bits[i] = q.quat_bits;
    bits[10] = q.beta_bits;
  }
};

uint16_t field_value(const QuantizedParams& t, int field) {
  if (field < 3) return t.mu[field];
  if (field < 6) return t.log_sigma[field - 3];
  if (field < 10) return t.quat[field - 6];
  return t.beta;
}

void set_field_value(QuantizedParams& t, int field, uint16_t v) {
  if (field < 3)
    t.mu[field] = v;
  else if (field < 6)
    t.log_sigma[field - 3] = v;
  else if (field < 10)
    t.quat[field - 6] = v;
  else
    t.beta = v;
}

}  // namespace

QuantizedParams quantize_params(const SurfelParams& params, int level,
                                const ParamQuantizer& quantizer,
                                int* clamped) {
  double box = static_cast<double>(1 << level);
  double sigma_lo = std::log(kSigmaMin);
  double sigma_hi = std::log(kSigmaMaxScale * box);
  double beta_lo = std::log(kBetaMin);
  double beta_hi = std::log(kBetaMax);

  QuantizedParams t;
  for (int i = 0; i < 3; ++i)
    t.mu[i] =
        quantize_mid_rise(params.mu[i], 0.0, box, quantizer.mu_bits, clamped);
  for (int i = 0; i < 3; ++i)
    t.log_sigma[i] = quantize_mid_rise(std::log(params.sigma[i]), sigma_lo,
                                       sigma_hi, quantizer.sigma_bits, clamped);
  Quaternion q = canonical_sign(params.quat);
  double comps[4] = {q.w, q.x, q.y, q.z};
  for (int i = 0; i < 4; ++i)
    t.quat[i] = quantize_quat_component(comps[i], quantizer.quat_bits, clamped);
  t.beta = quantize_mid_rise(std::log(params.beta), beta_lo, beta_hi,
                             quantizer.beta_bits, clamped);
  return t;
}

SurfelParams dequantize_params(const QuantizedParams& tuple, int level,
                               const ParamQuantizer& quantizer) {
  double box = static_cast<double>(1 << level);
  double sigma_lo = std::log(kSigmaMin);
  double sigma_hi = std::log(kSigmaMaxScale * box);
  double beta_lo = std::log(kBetaMin);
  double beta_hi = std::log(kBetaMax);

  SurfelParams p;
  for (int i = 0; i < 3; ++i)
    p.mu[i] = dequantize_mid_rise(tuple.mu[i], 0.0, box, quantizer.mu_bits);
  for (int i = 0; i < 3; ++i)
    p.sigma[i] = std::exp(dequantize_mid_rise(tuple.log_sigma[i], sigma_lo,
                                              sigma_hi, quantizer.sigma_bits));
  double c[4];
  for (int i = 0; i < 4; ++i)
    c[i] = dequantize_quat_component(tuple.quat[i], quantizer.quat_bits);
  double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
  if (n < 1e-12)
    raise(ErrorCode::kCorruptStream, "dequantized quaternion is zero");
  p.quat = {c[0] / n, c[1] / n, c[2] / n, c[3] / n};
  p.beta = std::exp(
      dequantize_mid_rise(tuple.beta, beta_lo, beta_hi, quantizer.beta_bits));
  return p;
}

ParamCoder::ParamCoder(const ParamQuantizer& quantizer)
    : quant_(quantizer), models_(17 * kFields * kMaxFieldBits) {}

void ParamCoder::encode(RangeEncoder& enc, int level,
                        const QuantizedParams& tuple) {
  FieldLayout layout;
  layout.init(quant_);
  for (int f = 0; f < kFields; ++f) {
    uint16_t v = field_value(tuple, f);
    for (int b = layout.bits[f] - 1; b >= 0; --b)
      enc.encode_bit(models_[model_index(level, f, b)], (v >> b) & 1);
  }
}

QuantizedParams ParamCoder::decode(RangeDecoder& dec, int level) {
  FieldLayout layout;
  layout.init(quant_);
  QuantizedParams tuple;
  for (int f = 0; f < kFields; ++f) {
    uint16_t v = 0;
    for (int b = layout.bits[f] - 1; b >= 0; --b)
      v = static_cast<uint16_t>(
          v | (dec.decode_bit(models_[model_index(level, f, b)]) << b));
    set_field_value(tuple, f, v);
  }
  return tuple;
}

double ParamCoder::estimate(int level, const QuantizedParams& tuple) const {
  FieldLayout layout;
  layout.init(quant_);
  double bits = 0.0;
  for (int f = 0; f < kFields; ++f) {
    uint16_t v = field_value(tuple, f);
    for (int b = layout.bits[f] - 1; b >= 0; --b)
      bits += estimate_bits(models_[model_index(level, f, b)], (v >> b) & 1);
  }
  return bits;
}

void ParamCoder::adapt(int level, const QuantizedParams& tuple) {
  FieldLayout layout;
  layout.init(quant_);
  for (int f = 0; f < kFields; ++f) {
    uint16_t v = field_value(tuple, f);
    for (int b = layout.bits[f] - 1; b >= 0; --b)
      models_[model_index(level, f, b)].update((v >> b) & 1);
  }
}

}  // namespace sfls
