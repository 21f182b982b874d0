// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sfls/octant_coder.hpp"
#include "sfls/param_coder.hpp"
#include "sfls/surfel_fit.hpp"

namespace sfls {

enum class Decision : uint8_t { kSurfel = 0, kSplit = 1 };

inline constexpr double kFlagBits = 1.0;

// Rate estimators used by the decision DP. Estimates are order-independent:
// octant and parameter costs come from frozen model snapshots taken after a
// calibration pass, falling back to context-free costs (8 bits per mask,
// raw quantizer width per surfel) when no snapshot is installed.
class RateModel {
 public:
  explicit RateModel(const ParamQuantizer& quantizer) : quant_(quantizer) {}

  void set_snapshots(OctantCoder octants, ParamCoder params) {
    octant_snapshot_ = std::move(octants);
    param_snapshot_ = std::move(params);
  }

  double flag_bits() const { return kFlagBits; }

  double param_bits(int level, const QuantizedParams& tuple) const {
    if (param_snapshot_) return param_snapshot_->estimate(level, tuple);
    return static_cast<double>(quant_.total_bits());
  }

  double octant_bits(int level, int parent_popcount, uint8_t mask) const {
    if (octant_snapshot_)
      return octant_snapshot_->estimate(level, parent_popcount, mask);
    return 8.0;
  }

  const ParamQuantizer& quantizer() const { return quant_; }

 private:
  ParamQuantizer quant_;
  std::optional<OctantCoder> octant_snapshot_;
  std::optional<ParamCoder> param_snapshot_;
};

// Costs of the two choices at one node, in bit-equivalent units (distortion
// in nats is converted by 1/ln 2 so lambda weights a single unit).
struct NodeCosts {
  double surfel = 0.0;       // lambda * D / ln 2 + param bits + flag bits
  double split_local = 0.0;  // flag bits + octant bits, children excluded
};

struct NodeCostDetail {
  NodeCosts costs;
  QuantizedParams tuple;
  SurfelParams params;  // dequantized; what the decoder will reconstruct
  double distortion = 0.0;  // nats, at the dequantized params
  double param_bits = 0.0;
  double octant_bits = 0.0;
};

// Fits the node, quantizes, and prices both decisions. The distortion used
// is the post-quantization one. Level-0 nodes are degenerate.
NodeCostDetail node_costs(const NodeAddress& node, const NodeSample& sample,
                          uint8_t mask, int parent_popcount, double lambda,
                          const RateModel& rate_model,
                          const FitConfig& fit_config);

// Per-node costs for every decidable level, aligned with
// OccupancyOctree::level(l) indices; entries outside [floor, cut] are unused.
using CostTable = std::vector<std::vector<NodeCosts>>;

// Bottom-up Lagrangian DP over the decidable levels [floor_level, cut_level]:
// cost(node) = min(surfel, split_local + sum of children costs), surfel
// forced at the floor, ties to surfel.
struct DecisionPlan {
  int cut_level = 1;
  int floor_level = 1;
  std::vector<std::vector<Decision>> decisions;     // [level][node index]
  std::vector<std::vector<double>> subtree_cost;    // [level][node index]
  double total_cost = 0.0;  // sum over all cut-level nodes
};

DecisionPlan plan_decisions(const OccupancyOctree& tree, int cut_level,
                            int floor_level, const CostTable& costs);

struct DecidedNode {
  NodeAddress address;
  Decision decision = Decision::kSurfel;
  uint8_t mask = 0;        // octants, for split nodes
  QuantizedParams tuple;   // for surfel nodes
  SurfelParams params;     // dequantized, for surfel nodes
  double distortion = 0.0; // nats, for surfel nodes
};

// The decided sub-forest from the cut level down; levels[l] holds the
// existing nodes of level l in Morton order. A node exists iff it is at the
// cut level or its parent is split; leaves are exactly the surfel nodes.
struct DecidedTree {
  int depth = 1;
  int cut_level = 1;
  int floor_level = 1;
  double lambda = 0.0;
  double total_cost = 0.0;
  std::vector<std::vector<DecidedNode>> levels;

  size_t surfel_count() const;
  size_t split_count() const;
};

// Fills surfel payload fields of a realized node; level_index addresses
// OccupancyOctree::level(address.level).
using SurfelFill =
    std::function<void(const NodeAddress&, size_t level_index, DecidedNode&)>;

DecidedTree realize_decisions(const OccupancyOctree& tree,
                              const DecisionPlan& plan, double lambda,
                              const SurfelFill& fill);

// One-call construction: fits every decidable node, prices it, runs the DP
// and realizes the decided tree.
DecidedTree decide_tree(const OccupancyOctree& tree, double lambda,
                        int cut_level, int floor_level,
                        const RateModel& rate_model,
                        const FitConfig& fit_config);

// --- probabilistic decision arithmetic (analysis utilities) ---

struct ProbNode {
  double split_prob = 0.5;  // conditional probability of splitting
  double distortion = 0.0;  // D(u) if the node ends as a surfel
  double bits = 0.0;        // B(u) if the node splits
  double marginal_split = 0.0;   // p~
  double marginal_surfel = 0.0;  // q~
  std::vector<ProbNode> children;
};

struct ProbTree {
  std::vector<ProbNode> roots;
};

// Fills the marginals: p~ = p * p~(parent), q~ = (1 - p) * p~(parent), with
// p~ = p at the top level.
void marginal_probabilities(ProbTree& tree);

struct ExpectedLoss {
  double distortion = 0.0;  // (1/N) sum q~ D(u)
  double rate = 0.0;        // (1/N) sum p~ B(u)
  double total = 0.0;       // lambda * distortion + rate
};

// Marginals must have been computed.
ExpectedLoss expected_loss(const ProbTree& tree, double lambda,
                           size_t n_points);

// Top-down termination: a node with q~ >= 1 - epsilon becomes a surfel,
// otherwise it splits; childless nodes are floor surfels. Returns one entry
// per ProbTree node in preorder: -1 nonexistent, 0 surfel, 1 split.
std::vector<int8_t> epsilon_terminate(const ProbTree& tree, double epsilon);

}  // namespace sfls
