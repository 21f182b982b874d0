// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/surfel.hpp"

#include <cmath>

#include "sfls/error.hpp"

namespace sfls {

namespace {

Quaternion normalized(const Quaternion& q) {
  double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (n < 1e-12)
    raise(ErrorCode::kDegenerateParameter, "zero quaternion");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void check_sigma(const Vec3& sigma) {
  for (int i = 0; i < 3; ++i)
    if (sigma[i] < kSigmaMin - 1e-12)
      raise(ErrorCode::kDegenerateParameter, "sigma below minimum");
}

// Rotation + axis weights of a surfel, the shared evaluation frame for all
// probability/distortion paths (kept identical so fitted and re-evaluated
// distortions agree bit for bit).
struct SurfelFrame {
  Mat3 rot;
  Vec3 weights;  // sigma^-2
  Vec3 mu;
  double half_beta;

  explicit SurfelFrame(const SurfelParams& p)
      : rot(rotation_from_quaternion(p.quat)),
        mu(p.mu),
        half_beta(0.5 * p.beta) {
    check_sigma(p.sigma);
    for (int i = 0; i < 3; ++i) weights[i] = 1.0 / (p.sigma[i] * p.sigma[i]);
  }

  double mahalanobis_sq(const Vec3& x) const {
    Vec3 d = x - mu;
    Vec3 y = rot.transposed_mul(d);
    return weights.x * y.x * y.x + weights.y * y.y * y.y +
           weights.z * y.z * y.z;
  }

  double probability(double r2) const {
    return r2 <= 0.0 ? 1.0 : std::exp(-0.5 * std::pow(r2, half_beta));
  }
};

}  // namespace

Mat3 rotation_from_quaternion(const Quaternion& q_in) {
  Quaternion q = normalized(q_in);
  double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r(0, 0) = w * w + x * x - y * y - z * z;
  r(0, 1) = 2.0 * (x * y - w * z);
  r(0, 2) = 2.0 * (x * z + w * y);
  r(1, 0) = 2.0 * (x * y + w * z);
  r(1, 1) = w * w - x * x + y * y - z * z;
  r(1, 2) = 2.0 * (y * z - w * x);
  r(2, 0) = 2.0 * (x * z - w * y);
  r(2, 1) = 2.0 * (y * z + w * x);
  r(2, 2) = w * w - x * x - y * y + z * z;
  return r;
}

Quaternion quaternion_from_rotation(const Mat3& m) {
  // Shepperd's method: branch on the numerically largest component.
  double t = m(0, 0) + m(1, 1) + m(2, 2);
  Quaternion q;
  if (t > 0.0) {
    double s = std::sqrt(t + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return normalized(q);
}

Mat3 precision_matrix(const Vec3& sigma, const Quaternion& quat) {
  check_sigma(sigma);
  Mat3 r = rotation_from_quaternion(quat);
  Mat3 w{};
  for (int i = 0; i < 3; ++i) w(i, i) = 1.0 / (sigma[i] * sigma[i]);
  return r * w * r.transposed();
}

double occupancy_probability(const SurfelParams& params, const Vec3& x_local) {
  SurfelFrame frame(params);
  return frame.probability(frame.mahalanobis_sq(x_local));
}

NodeSample make_node_sample(const OccupancyOctree& tree,
                            const NodeAddress& node) {
  NodeSample sample;
  sample.level = node.level;
  sample.occupancy = tree.cell_occupancy(node);
  for (uint8_t q : sample.occupancy) sample.occupied += q;
  if (sample.occupied == 0)
    raise(ErrorCode::kDegenerateNode, "node has no occupied voxel");
  return sample;
}

std::vector<Vec3> local_voxel_coords(int level) {
  uint64_t count = 1ULL << (3 * level);
  std::vector<Vec3> coords(count);
  for (uint64_t k = 0; k < count; ++k) {
    Coord3 c = morton_decode(k, level);
    coords[k] = {static_cast<double>(c.x), static_cast<double>(c.y),
                 static_cast<double>(c.z)};
  }
  return coords;
}

double node_distortion(const SurfelParams& params, const NodeSample& sample,
                       double p_min) {
  if (sample.occupancy.empty())
    raise(ErrorCode::kDegenerateNode, "empty node sample");
  SurfelFrame frame(params);
  double d_total = 0.0;
  uint64_t count = sample.occupancy.size();
  for (uint64_t k = 0; k < count; ++k) {
    Coord3 c = morton_decode(k, sample.level);
    double r2 = frame.mahalanobis_sq({static_cast<double>(c.x),
                                      static_cast<double>(c.y),
                                      static_cast<double>(c.z)});
    double p = frame.probability(r2);
    double pc = std::min(std::max(p, p_min), 1.0 - p_min);
    d_total -= sample.occupancy[k] ? std::log(pc) : std::log(1.0 - pc);
  }
  return d_total;
}

double planarity_ratio(const SurfelParams& params) {
  double a = params.sigma.x, b = params.sigma.y, c = params.sigma.z;
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  return b / c;
}

SurfelParams fit_state_to_params(const FitState& state) {
  SurfelParams p;
  p.mu = state.mu;
  for (int i = 0; i < 3; ++i) p.sigma[i] = kSigmaMin + std::exp(state.s[i]);
  p.quat = normalized({state.q[0], state.q[1], state.q[2], state.q[3]});
  p.beta = kBetaMin + (kBetaMax - kBetaMin) * sigmoid(state.b);
  return p;
}

FitState fit_state_from_params(const SurfelParams& params) {
  FitState s;
  s.mu = params.mu;
  for (int i = 0; i < 3; ++i)
    s.s[i] = std::log(std::max(params.sigma[i] - kSigmaMin, 1e-4));
  Quaternion q = normalized(params.quat);
  s.q = {q.w, q.x, q.y, q.z};
  double frac = (params.beta - kBetaMin) / (kBetaMax - kBetaMin);
  frac = std::min(std::max(frac, 1e-6), 1.0 - 1e-6);
  s.b = std::log(frac / (1.0 - frac));
  return s;
}

double distortion_gradient(const FitState& state, const NodeSample& sample,
                           double p_min, std::array<double, 11>* grad) {
  if (sample.occupancy.empty())
    raise(ErrorCode::kDegenerateNode, "empty node sample");

  SurfelParams params = fit_state_to_params(state);
  SurfelFrame frame(params);
  double qn = std::sqrt(state.q[0] * state.q[0] + state.q[1] * state.q[1] +
                        state.q[2] * state.q[2] + state.q[3] * state.q[3]);
  double w = params.quat.w, x = params.quat.x, y = params.quat.y,
         z = params.quat.z;

  // dR/dq at the normalized quaternion, row-major.
  const Mat3 dr[4] = {
      {{2 * w, -2 * z, 2 * y, 2 * z, 2 * w, -2 * x, -2 * y, 2 * x, 2 * w}},
      {{2 * x, 2 * y, 2 * z, 2 * y, -2 * x, -2 * w, 2 * z, 2 * w, -2 * x}},
      {{-2 * y, 2 * x, 2 * w, 2 * x, 2 * y, 2 * z, -2 * w, 2 * z, -2 * y}},
      {{-2 * z, -2 * w, 2 * x, 2 * w, -2 * z, 2 * y, 2 * x, 2 * y, 2 * z}}};

  Vec3 dw_ds;  // d(sigma^-2)/ds = -2 sigma^-3 * exp(s)
  for (int i = 0; i < 3; ++i) {
    double sg = params.sigma[i];
    dw_ds[i] = -2.0 / (sg * sg * sg) * std::exp(state.s[i]);
  }

  double beta = params.beta;
  double sig_b = (beta - kBetaMin) / (kBetaMax - kBetaMin);
  double dbeta_db = (kBetaMax - kBetaMin) * sig_b * (1.0 - sig_b);

  double d_total = 0.0;
  Vec3 g_mu{}, g_s{};
  std::array<double, 4> g_qhat = {0, 0, 0, 0};
  double g_b = 0.0;

  uint64_t count = sample.occupancy.size();
  for (uint64_t k = 0; k < count; ++k) {
    Coord3 c = morton_decode(k, sample.level);
    Vec3 d = Vec3{static_cast<double>(c.x), static_cast<double>(c.y),
                  static_cast<double>(c.z)} -
             frame.mu;
    Vec3 yv = frame.rot.transposed_mul(d);
    Vec3 u = {frame.weights.x * yv.x, frame.weights.y * yv.y,
              frame.weights.z * yv.z};
    double r2 = frame.weights.x * yv.x * yv.x + frame.weights.y * yv.y * yv.y +
                frame.weights.z * yv.z * yv.z;
    double q_occ = sample.occupancy[k];

    double p = frame.probability(r2);
    double pc = std::min(std::max(p, p_min), 1.0 - p_min);
    d_total -= q_occ ? std::log(pc) : std::log(1.0 - pc);

    if (!grad || p <= p_min || p >= 1.0 - p_min || r2 <= 0.0) continue;

    double g_val = std::pow(r2, frame.half_beta);
    double dd_dp = -q_occ / p + (1.0 - q_occ) / (1.0 - p);
    double cg = dd_dp * (-0.5 * p);  // dD/dg, g = r^beta, P = exp(-g/2)
    double cr2 = cg * frame.half_beta * g_val / r2;

    Vec3 md = frame.rot * u;  // (R W R^T) d
    g_mu += md * (-2.0 * cr2);
    for (int i = 0; i < 3; ++i) g_s[i] += cr2 * yv[i] * yv[i] * dw_ds[i];
    for (int i = 0; i < 4; ++i) g_qhat[i] += cr2 * 2.0 * dot(d, dr[i] * u);
    g_b += cg * g_val * 0.5 * std::log(r2) * dbeta_db;
  }

  if (grad) {
    // Back through the normalization map q -> q/|q|.
    std::array<double, 4> qh = {w, x, y, z};
    double proj = 0.0;
    for (int i = 0; i < 4; ++i) proj += g_qhat[i] * qh[i];
    (*grad)[0] = g_mu.x;
    (*grad)[1] = g_mu.y;
    (*grad)[2] = g_mu.z;
    (*grad)[3] = g_s.x;
    (*grad)[4] = g_s.y;
    (*grad)[5] = g_s.z;
    for (int i = 0; i < 4; ++i)
      (*grad)[6 + i] = (g_qhat[i] - proj * qh[i]) / qn;
    (*grad)[10] = g_b;
  }
  return d_total;
}

}  // namespace sfls
