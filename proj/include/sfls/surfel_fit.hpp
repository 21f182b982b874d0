// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sfls/surfel.hpp"

namespace sfls {

struct FitConfig {
  int max_iters = 300;
  double step_size = 0.05;
  double beta1 = 0.9;   // first-moment decay
  double beta2 = 0.999; // second-moment decay
  double p_min = kDefaultProbClamp;
  uint64_t seed = 0;
};

struct FitResult {
  SurfelParams params;
  double distortion = 0.0;
};

// PCA of the occupied voxels: centroid mean, eigenvector rotation,
// sqrt-eigenvalue sigmas (floored at kSigmaMin), beta = 2.
SurfelParams pca_init(const NodeSample& sample);

// Adaptive-moment gradient descent from the PCA initialization, best iterate
// kept. Deterministic for a given (sample, config); the returned distortion
// is node_distortion at the returned params and never exceeds the
// initialization's.
FitResult fit_surfel(const NodeSample& sample, const FitConfig& config = {});

}  // namespace sfls
