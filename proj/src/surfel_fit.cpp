// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/surfel_fit.hpp"

#include <algorithm>
#include <cmath>

#include "sfls/error.hpp"

namespace sfls {

namespace {

constexpr double kAdamEpsilon = 1e-8;
constexpr double kMinLogSigmaOffset = -18.0;  // exp(-18) ~ 1.5e-8 voxels

void project(FitState& state, double box, double s_max) {
  for (int i = 0; i < 3; ++i) {
    state.mu[i] = std::min(std::max(state.mu[i], 0.0), box);
    state.s[i] = std::min(std::max(state.s[i], kMinLogSigmaOffset), s_max);
  }
  double n = std::sqrt(state.q[0] * state.q[0] + state.q[1] * state.q[1] +
                       state.q[2] * state.q[2] + state.q[3] * state.q[3]);
  if (n < 1e-12) {
    state.q = {1.0, 0.0, 0.0, 0.0};
  } else {
    for (double& c : state.q) c /= n;
  }
  state.b = std::min(std::max(state.b, -30.0), 30.0);
}

}  // namespace

SurfelParams pca_init(const NodeSample& sample) {
  if (sample.occupied == 0)
    raise(ErrorCode::kDegenerateNode, "cannot initialize from empty sample");

  Vec3 mean{};
  uint64_t count = sample.occupancy.size();
  for (uint64_t k = 0; k < count; ++k) {
    if (!sample.occupancy[k]) continue;
    Coord3 c = morton_decode(k, sample.level);
    mean += Vec3{static_cast<double>(c.x), static_cast<double>(c.y),
                 static_cast<double>(c.z)};
  }
  double inv_n = 1.0 / static_cast<double>(sample.occupied);
  mean = mean * inv_n;

  Mat3 cov{};
  for (uint64_t k = 0; k < count; ++k) {
    if (!sample.occupancy[k]) continue;
    Coord3 c = morton_decode(k, sample.level);
    Vec3 d = Vec3{static_cast<double>(c.x), static_cast<double>(c.y),
                  static_cast<double>(c.z)} -
             mean;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov(i, j) += d[i] * d[j] * inv_n;
  }

  Vec3 eig;
  Mat3 vecs;
  symmetric_eigen3(cov, eig, vecs);
  if (vecs.det() < 0.0)
    for (int r = 0; r < 3; ++r) vecs(r, 2) = -vecs(r, 2);

  double sigma_cap = kSigmaMaxScale * static_cast<double>(1 << sample.level);
  SurfelParams p;
  p.mu = mean;
  for (int i = 0; i < 3; ++i) {
    double s = std::sqrt(std::max(eig[i], 0.0));
    p.sigma[i] = std::min(std::max(s, kSigmaMin), sigma_cap);
  }
  p.quat = quaternion_from_rotation(vecs);
  p.beta = 2.0;
  return p;
}

FitResult fit_surfel(const NodeSample& sample, const FitConfig& config) {
  if (config.max_iters < 1)
    raise(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (config.p_min <= 0.0 || config.p_min >= 0.5)
    raise(ErrorCode::kInvalidArgument, "p_min must be in (0, 0.5)");

  double box = static_cast<double>(1 << sample.level);
  double s_max = std::log(kSigmaMaxScale * box - kSigmaMin);

  FitState state = fit_state_from_params(pca_init(sample));
  project(state, box, s_max);

  FitState best_state = state;
  double best_d = distortion_gradient(state, sample, config.p_min, nullptr);

  std::array<double, 11> grad{}, m{}, v{};
  double b1t = 1.0, b2t = 1.0;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    double d = distortion_gradient(state, sample, config.p_min, &grad);
    if (d < best_d) {
      best_d = d;
      best_state = state;
    }

    b1t *= config.beta1;
    b2t *= config.beta2;
    std::array<double, 11> step{};
    for (int i = 0; i < 11; ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      double mhat = m[i] / (1.0 - b1t);
      double vhat = v[i] / (1.0 - b2t);
      step[i] = config.step_size * mhat / (std::sqrt(vhat) + kAdamEpsilon);
    }
    state.mu.x -= step[0];
    state.mu.y -= step[1];
    state.mu.z -= step[2];
    state.s.x -= step[3];
    state.s.y -= step[4];
    state.s.z -= step[5];
    for (int i = 0; i < 4; ++i) state.q[i] -= step[6 + i];
    state.b -= step[10];
    project(state, box, s_max);
  }

  double final_d = distortion_gradient(state, sample, config.p_min, nullptr);
  if (final_d < best_d) {
    best_d = final_d;
    best_state = state;
  }
  return {fit_state_to_params(best_state), best_d};
}

}  // namespace sfls
