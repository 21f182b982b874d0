// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sfls/surfel_fit.hpp"

using namespace sfls;

namespace {

NodeSample random_sample(std::mt19937_64& rng, int level, double fill = 0.3) {
  NodeSample s;
  s.level = level;
  s.occupancy.assign(1ULL << (3 * level), 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& q : s.occupancy)
    if (u(rng) < fill) {
      q = 1;
      ++s.occupied;
    }
  if (s.occupied == 0) {
    s.occupancy[rng() % s.occupancy.size()] = 1;
    s.occupied = 1;
  }
  return s;
}

FitState random_state(std::mt19937_64& rng, int level) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  double box = static_cast<double>(1 << level);

  FitState st;
  for (int i = 0; i < 3; ++i) {
    st.mu[i] = 0.2 * box + 0.6 * box * u(rng);
    double sigma = 0.3 + u(rng) * (box - 0.3);
    st.s[i] = std::log(sigma - kSigmaMin);
  }
  double qn = 0.0;
  for (int i = 0; i < 4; ++i) {
    st.q[i] = g(rng);
    qn += st.q[i] * st.q[i];
  }
  qn = std::sqrt(qn);
  for (int i = 0; i < 4; ++i) st.q[i] /= qn;
  double beta = 0.9 + u(rng) * 4.1;
  double frac = (beta - kBetaMin) / (kBetaMax - kBetaMin);
  st.b = std::log(frac / (1.0 - frac));
  return st;
}

// Central finite differences of node_distortion in FitState coordinates.
std::array<double, 11> fd_gradient(const FitState& state,
                                   const NodeSample& sample, double p_min,
                                   double h) {
  auto eval = [&](const FitState& s) {
    return distortion_gradient(s, sample, p_min, nullptr);
  };
  auto bump = [&](int i, double delta) {
    FitState s = state;
    if (i < 3)
      s.mu[i] += delta;
    else if (i < 6)
      s.s[i - 3] += delta;
    else if (i < 10)
      s.q[i - 6] += delta;
    else
      s.b += delta;
    return s;
  };
  std::array<double, 11> g{};
  for (int i = 0; i < 11; ++i)
    g[i] = (eval(bump(i, h)) - eval(bump(i, -h))) / (2.0 * h);
  return g;
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(21);
  double h = 1e-4;
  double worst = 0.0;
  int pairs = 0;
  for (int level : {1, 2}) {
    for (int trial = 0; trial < 60; ++trial) {
      NodeSample sample = random_sample(rng, level);
      FitState state = random_state(rng, level);
      std::array<double, 11> analytic{};
      distortion_gradient(state, sample, kDefaultProbClamp, &analytic);
      std::array<double, 11> numeric =
          fd_gradient(state, sample, kDefaultProbClamp, h);
      for (int i = 0; i < 11; ++i) {
        double rel = std::abs(analytic[i] - numeric[i]) /
                     std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
        worst = std::max(worst, rel);
      }
      ++pairs;
    }
  }
  CHECK(pairs >= 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("symmetric occupancy zeroes the mu gradient on that axis") {
  // Level-1 cell with mu at the cell midplane: every voxel has an exact
  // x-mirror, occupied and empty alike, so the x gradient cancels.
  NodeSample s;
  s.level = 1;
  s.occupancy.assign(8, 0);
  s.occupancy[morton_encode(0, 0, 0, 1)] = 1;
  s.occupancy[morton_encode(1, 0, 0, 1)] = 1;
  s.occupied = 2;

  FitState st;
  st.mu = {0.5, 0.3, 0.6};
  st.s = {std::log(1.0 - kSigmaMin), std::log(0.8 - kSigmaMin),
          std::log(1.2 - kSigmaMin)};
  st.q = {1, 0, 0, 0};
  st.b = 0.4;

  std::array<double, 11> g{};
  distortion_gradient(st, s, kDefaultProbClamp, &g);
  CHECK(std::abs(g[0]) < 1e-12);
}

TEST_CASE("fully clamped region has zero gradient") {
  // Empty-occupancy would be invalid; use one occupied voxel and park the
  // surfel so every probability saturates the clamp.
  NodeSample s;
  s.level = 1;
  s.occupancy.assign(8, 0);
  s.occupancy[0] = 1;
  s.occupied = 1;

  FitState st;
  st.mu = {0.0, 0.0, 0.0};
  st.s = {std::log(1e-6), std::log(1e-6), std::log(1e-6)};  // sigma ~ minimum
  st.q = {1, 0, 0, 0};
  st.b = 0.0;

  // With sigma at the floor, P is ~1 at the occupied corner (clamped) and
  // ~0 elsewhere (clamped): gradient vanishes everywhere.
  std::array<double, 11> g{};
  distortion_gradient(st, s, kDefaultProbClamp, &g);
  for (double v : g) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("point mass fit concentrates at the occupied cell") {
  NodeSample s;
  s.level = 2;
  s.occupancy.assign(64, 0);
  uint64_t target = morton_encode(2, 1, 3, 2);
  s.occupancy[target] = 1;
  s.occupied = 1;

  FitResult fit = fit_surfel(s);
  Coord3 c = morton_decode(target, 2);
  CHECK(std::abs(fit.params.mu.x - c.x) <= 0.5);
  CHECK(std::abs(fit.params.mu.y - c.y) <= 0.5);
  CHECK(std::abs(fit.params.mu.z - c.z) <= 0.5);
  for (int i = 0; i < 3; ++i) CHECK(fit.params.sigma[i] <= 0.35);
}

TEST_CASE("slab occupancy fits a planar surfel") {
  // Flat slab through an 8^3 node: one z-layer fully occupied.
  NodeSample s;
  s.level = 3;
  s.occupancy.assign(512, 0);
  for (uint32_t x = 0; x < 8; ++x)
    for (uint32_t y = 0; y < 8; ++y) {
      s.occupancy[morton_encode(x, y, 3, 3)] = 1;
      ++s.occupied;
    }

  FitResult fit = fit_surfel(s);
  CHECK(planarity_ratio(fit.params) >= 5.0);
}

TEST_CASE("fit never loses to its PCA initialization") {
  std::mt19937_64 rng(22);
  FitConfig config;
  for (int trial = 0; trial < 100; ++trial) {
    NodeSample s = random_sample(rng, 2, 0.15 + 0.3 * (trial % 3));
    double init_d =
        node_distortion(pca_init(s), s, config.p_min);
    FitResult fit = fit_surfel(s, config);
    CHECK(fit.distortion <= init_d + 1e-12);
    CHECK(fit.distortion == node_distortion(fit.params, s, config.p_min));
  }
}

TEST_CASE("fit is deterministic") {
  std::mt19937_64 rng(23);
  NodeSample s = random_sample(rng, 2, 0.25);
  FitResult a = fit_surfel(s);
  FitResult b = fit_surfel(s);
  CHECK(a.distortion == b.distortion);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.params.mu[i] == b.params.mu[i]);
    CHECK(a.params.sigma[i] == b.params.sigma[i]);
  }
  CHECK(a.params.quat.w == b.params.quat.w);
  CHECK(a.params.quat.x == b.params.quat.x);
  CHECK(a.params.beta == b.params.beta);
}
