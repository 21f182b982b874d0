// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sfls/geometry.hpp"
#include "sfls/octree.hpp"

namespace sfls {

// Parameter bounds shared by the fitter and the bitstream quantizer.
inline constexpr double kSigmaMin = 0.05;
inline constexpr double kSigmaMaxScale = 4.0;  // per-axis cap: 2^level * 4
inline constexpr double kBetaMin = 0.5;
inline constexpr double kBetaMax = 8.0;
inline constexpr double kDefaultProbClamp = 1e-6;

struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

// Bounded generalized-Gaussian occupancy primitive: 11 parameters, expressed
// in node-local coordinates (the node's cell spans [0, 2^level] per axis).
struct SurfelParams {
  Vec3 mu;
  Vec3 sigma = {1.0, 1.0, 1.0};
  Quaternion quat;
  double beta = 2.0;
};

// Rotation matrix of a (renormalized) quaternion. A zero quaternion is a
// degenerate-parameter error.
Mat3 rotation_from_quaternion(const Quaternion& q);

Quaternion quaternion_from_rotation(const Mat3& r);

// Sigma^-1 = R diag(sigma^-2) R^T. Any sigma below kSigmaMin is a
// degenerate-parameter error.
Mat3 precision_matrix(const Vec3& sigma, const Quaternion& quat);

// P(x) = exp(-1/2 * r^beta) with r = sqrt((x-mu)^T Sigma^-1 (x-mu)); x in
// node-local coordinates. Always in (0, 1], exactly 1 only at x = mu.
double occupancy_probability(const SurfelParams& params, const Vec3& x_local);

// Ground-truth occupancy of one node's cell. Voxels are implicit: entry k of
// `occupancy` refers to the voxel with local Morton code k (node_voxels
// order), evaluated at its integer corner coordinate.
struct NodeSample {
  int level = 1;
  std::vector<uint8_t> occupancy;  // 8^level entries
  size_t occupied = 0;
};

NodeSample make_node_sample(const OccupancyOctree& tree,
                            const NodeAddress& node);

// Local evaluation coordinates for every voxel of a level-l cell, local
// Morton order.
std::vector<Vec3> local_voxel_coords(int level);

// Binary cross entropy of the ground-truth occupancies under the surfel's
// probability field, probabilities clamped to [p_min, 1 - p_min]. Natural
// log; nonnegative.
double node_distortion(const SurfelParams& params, const NodeSample& sample,
                       double p_min = kDefaultProbClamp);

// min of the two largest sigmas over the smallest.
double planarity_ratio(const SurfelParams& params);

// Unconstrained fitting coordinates: mu free, sigma = kSigmaMin + exp(s),
// quaternion normalized on use, beta = kBetaMin + span * sigmoid(b).
struct FitState {
  Vec3 mu;
  Vec3 s;
  std::array<double, 4> q = {1.0, 0.0, 0.0, 0.0};
  double b = 0.0;
};

SurfelParams fit_state_to_params(const FitState& state);
FitState fit_state_from_params(const SurfelParams& params);

// node_distortion and its analytic gradient in FitState coordinates
// (11 entries: mu, s, q, b). Voxels whose probability hits the clamp
// contribute zero gradient. Returns the distortion.
double distortion_gradient(const FitState& state, const NodeSample& sample,
                           double p_min, std::array<double, 11>* grad);

}  // namespace sfls
