// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sfls/rd_tree.hpp"

namespace sfls {

struct CodecConfig {
  double lambda = 1.0;
  int cut_level = 3;    // highest level carrying surfel/split decisions
  int floor_level = 1;  // level at which nodes terminate as surfels
  double rho = 1.0;     // binarization scale, stored as u16 / 2^10
  ParamQuantizer quantizer;
  FitConfig fit;
  int threads = 0;  // 0 = auto; always capped by SURFELSOUP_THREADS
};

struct LevelStats {
  uint32_t surfels = 0;
  uint32_t splits = 0;
};

struct EncodeStats {
  uint64_t total_bytes = 0;
  double bpp = 0.0;
  // Estimate-based decomposition of the coded body along the realized
  // model trajectory (the byte total above is exact).
  double flag_bits = 0.0;
  double octant_bits = 0.0;
  double surfel_bits = 0.0;
  int clamped_params = 0;
  std::array<LevelStats, kMaxDepth + 1> levels{};
};

// Everything the decoder reproduces, in coding order; used to verify
// encoder/decoder lockstep.
struct NodeRecord {
  NodeAddress address;
  Decision decision = Decision::kSplit;
  uint8_t mask = 0;       // split nodes
  QuantizedParams tuple;  // surfel nodes
  bool operator==(const NodeRecord&) const = default;
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  EncodeStats stats;
  DecidedTree tree;
  std::vector<NodeRecord> records;
};

// Lambda-independent encoder state: octree, per-node fits and rate-model
// snapshots. Building it is the expensive step; realizing a bitstream for a
// given lambda is cheap, and encode() == analyze() + realize() bit for bit.
class EncoderAnalysis {
 public:
  static EncoderAnalysis build(const PointCloud& cloud,
                               const CodecConfig& config);

  const OccupancyOctree& octree() const { return octree_; }
  const RateModel& rate_model() const { return rate_model_; }
  uint32_t point_count() const { return n_points_; }

  EncodeResult realize(const CodecConfig& config) const;

 private:
  struct FittedNode {
    QuantizedParams tuple;
    SurfelParams params;
    double distortion = 0.0;  // nats at dequantized params
    double param_bits = 0.0;
    double octant_bits = 0.0;
    int clamped = 0;
  };

  OccupancyOctree octree_;
  RateModel rate_model_{ParamQuantizer{}};
  std::vector<std::vector<FittedNode>> fits_;  // [level][node index]
  std::vector<std::vector<int>> parent_popcounts_;
  uint32_t n_points_ = 0;
  int cut_level_ = 3;
  int floor_level_ = 1;
};

EncodeResult encode(const PointCloud& cloud, const CodecConfig& config);

struct DecodeResult {
  PointCloud cloud;
  int depth = 0;
  int cut_level = 0;
  int floor_level = 0;
  uint32_t n_points = 0;
  double rho = 1.0;
  uint8_t lambda_tag = 0;
  std::vector<NodeRecord> records;
};

DecodeResult decode(std::span<const uint8_t> bytes);

// One reconstruction candidate: a voxel and its occupancy probability.
struct Candidate {
  uint64_t morton = 0;  // at full depth
  double probability = 0.0;
};

// Candidates for every voxel of a surfel leaf. A level-0 leaf degenerates to
// its single voxel with probability 1.
std::vector<Candidate> voxelize_leaf(const NodeAddress& leaf,
                                     const SurfelParams& params, int depth);

// Keeps the floor(rho * n_original) candidates with the highest
// probabilities, ties broken by ascending Morton code.
PointCloud binarize(std::vector<Candidate> candidates, uint32_t n_original,
                    double rho, int depth);

// Reference coder: the full occupancy octree down to the voxel level with
// the same range coder and octant contexts, no surfels. Round-trips exactly.
std::vector<uint8_t> encode_octree_lossless(const OccupancyOctree& tree);
PointCloud decode_octree_lossless(std::span<const uint8_t> bytes);

}  // namespace sfls
