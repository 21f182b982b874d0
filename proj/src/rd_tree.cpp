// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/rd_tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "sfls/error.hpp"
#include "sfls/parallel.hpp"

namespace sfls {

namespace {

// Index of the child node (morton = parent_morton * 8 + octant) in the
// sorted level vector below, or -1 if absent.
ptrdiff_t find_node(const std::vector<LevelNode>& nodes, uint64_t morton) {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), morton,
      [](const LevelNode& n, uint64_t m) { return n.morton < m; });
  if (it == nodes.end() || it->morton != morton) return -1;
  return it - nodes.begin();
}

void check_cut_floor(const OccupancyOctree& tree, int cut_level,
                     int floor_level) {
  if (cut_level > tree.depth() || cut_level < 1)
    raise(ErrorCode::kInvalidArgument, "cut level out of range");
  if (floor_level < 1 || floor_level > cut_level)
    raise(ErrorCode::kInvalidArgument, "floor level out of range");
}

}  // namespace

NodeCostDetail node_costs(const NodeAddress& node, const NodeSample& sample,
                          uint8_t mask, int parent_popcount, double lambda,
                          const RateModel& rate_model,
                          const FitConfig& fit_config) {
  if (node.level < 1)
    raise(ErrorCode::kDegenerateNode, "level-0 nodes carry no decision");
  if (lambda < 0.0)
    raise(ErrorCode::kInvalidArgument, "lambda must be nonnegative");

  NodeCostDetail detail;
  FitResult fit = fit_surfel(sample, fit_config);
  detail.tuple =
      quantize_params(fit.params, node.level, rate_model.quantizer());
  detail.params =
      dequantize_params(detail.tuple, node.level, rate_model.quantizer());
  detail.distortion = node_distortion(detail.params, sample, fit_config.p_min);
  detail.param_bits = rate_model.param_bits(node.level, detail.tuple);
  detail.octant_bits =
      rate_model.octant_bits(node.level, parent_popcount, mask);

  double d_bits = lambda * detail.distortion / std::numbers::ln2;
  detail.costs.surfel =
      d_bits + detail.param_bits + rate_model.flag_bits();
  detail.costs.split_local = rate_model.flag_bits() + detail.octant_bits;
  return detail;
}

DecisionPlan plan_decisions(const OccupancyOctree& tree, int cut_level,
                            int floor_level, const CostTable& costs) {
  check_cut_floor(tree, cut_level, floor_level);
  if (tree.level(cut_level).empty())
    raise(ErrorCode::kEmptyInput, "octree has no nodes at the cut level");

  DecisionPlan plan;
  plan.cut_level = cut_level;
  plan.floor_level = floor_level;
  plan.decisions.resize(cut_level + 1);
  plan.subtree_cost.resize(cut_level + 1);

  for (int l = floor_level; l <= cut_level; ++l) {
    const auto& nodes = tree.level(l);
    plan.decisions[l].assign(nodes.size(), Decision::kSurfel);
    plan.subtree_cost[l].assign(nodes.size(), 0.0);

    for (size_t i = 0; i < nodes.size(); ++i) {
      const NodeCosts& c = costs[l][i];
      if (l == floor_level) {
        // Forced surfel; no decision flag is priced at the floor.
        plan.subtree_cost[l][i] = c.surfel;
        continue;
      }
      double split_total = c.split_local;
      for (int j = 0; j < 8; ++j) {
        if (!(nodes[i].mask >> j & 1)) continue;
        ptrdiff_t child =
            find_node(tree.level(l - 1), nodes[i].morton * 8 + j);
        split_total += plan.subtree_cost[l - 1][child];
      }
      if (c.surfel <= split_total) {
        plan.decisions[l][i] = Decision::kSurfel;
        plan.subtree_cost[l][i] = c.surfel;
      } else {
        plan.decisions[l][i] = Decision::kSplit;
        plan.subtree_cost[l][i] = split_total;
      }
    }
  }

  for (double c : plan.subtree_cost[cut_level]) plan.total_cost += c;
  return plan;
}

DecidedTree realize_decisions(const OccupancyOctree& tree,
                              const DecisionPlan& plan, double lambda,
                              const SurfelFill& fill) {
  DecidedTree decided;
  decided.depth = tree.depth();
  decided.cut_level = plan.cut_level;
  decided.floor_level = plan.floor_level;
  decided.lambda = lambda;
  decided.total_cost = plan.total_cost;
  decided.levels.resize(plan.cut_level + 1);

  // Existence mask per level, seeded with every cut-level node.
  std::vector<std::vector<char>> exists(plan.cut_level + 1);
  exists[plan.cut_level].assign(tree.level(plan.cut_level).size(), 1);
  for (int l = plan.floor_level; l < plan.cut_level; ++l)
    exists[l].assign(tree.level(l).size(), 0);

  for (int l = plan.cut_level; l >= plan.floor_level; --l) {
    const auto& nodes = tree.level(l);
    auto& out = decided.levels[l];
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (!exists[l][i]) continue;
      DecidedNode dn;
      dn.address = {l, nodes[i].morton};
      dn.decision =
          l == plan.floor_level ? Decision::kSurfel : plan.decisions[l][i];
      if (dn.decision == Decision::kSplit) {
        dn.mask = nodes[i].mask;
        for (int j = 0; j < 8; ++j) {
          if (!(nodes[i].mask >> j & 1)) continue;
          ptrdiff_t child =
              find_node(tree.level(l - 1), nodes[i].morton * 8 + j);
          exists[l - 1][child] = 1;
        }
      } else {
        fill(dn.address, i, dn);
      }
      out.push_back(std::move(dn));
    }
  }
  return decided;
}

DecidedTree decide_tree(const OccupancyOctree& tree, double lambda,
                        int cut_level, int floor_level,
                        const RateModel& rate_model,
                        const FitConfig& fit_config) {
  check_cut_floor(tree, cut_level, floor_level);

  std::vector<std::vector<NodeCostDetail>> details(cut_level + 1);
  CostTable costs(cut_level + 1);
  for (int l = floor_level; l <= cut_level; ++l) {
    const auto& nodes = tree.level(l);
    details[l].resize(nodes.size());
    costs[l].resize(nodes.size());
    const auto& parents = l < tree.depth() ? tree.level(l + 1) : tree.level(l);
    parallel_for(nodes.size(), resolve_thread_count(0), [&](size_t i) {
      int parent_popcount = OctantCoder::kRootParentPopcount;
      if (l < tree.depth()) {
        ptrdiff_t pi = find_node(parents, nodes[i].morton >> 3);
        parent_popcount = std::popcount(parents[pi].mask);
      }
      NodeAddress addr{l, nodes[i].morton};
      NodeSample sample = make_node_sample(tree, addr);
      details[l][i] = node_costs(addr, sample, nodes[i].mask, parent_popcount,
                                 lambda, rate_model, fit_config);
      costs[l][i] = details[l][i].costs;
      if (l == floor_level) {
        // The forced floor carries no flag.
        costs[l][i].surfel -= rate_model.flag_bits();
      }
    });
  }

  DecisionPlan plan = plan_decisions(tree, cut_level, floor_level, costs);
  return realize_decisions(
      tree, plan, lambda,
      [&](const NodeAddress& addr, size_t i, DecidedNode& dn) {
        const NodeCostDetail& d = details[addr.level][i];
        dn.tuple = d.tuple;
        dn.params = d.params;
        dn.distortion = d.distortion;
      });
}

size_t DecidedTree::surfel_count() const {
  size_t n = 0;
  for (const auto& level : levels)
    for (const DecidedNode& dn : level)
      if (dn.decision == Decision::kSurfel) ++n;
  return n;
}

size_t DecidedTree::split_count() const {
  size_t n = 0;
  for (const auto& level : levels)
    for (const DecidedNode& dn : level)
      if (dn.decision == Decision::kSplit) ++n;
  return n;
}

namespace {

void fill_marginals(ProbNode& node, double parent_split_marginal) {
  node.marginal_split = node.split_prob * parent_split_marginal;
  node.marginal_surfel = (1.0 - node.split_prob) * parent_split_marginal;
  for (ProbNode& child : node.children)
    fill_marginals(child, node.marginal_split);
}

void accumulate_loss(const ProbNode& node, double& distortion, double& rate) {
  distortion += node.marginal_surfel * node.distortion;
  rate += node.marginal_split * node.bits;
  for (const ProbNode& child : node.children)
    accumulate_loss(child, distortion, rate);
}

void terminate_preorder(const ProbNode& node, double epsilon, bool exists,
                        std::vector<int8_t>& out) {
  int8_t state;
  if (!exists) {
    state = -1;
  } else if (node.children.empty()) {
    state = 0;  // floor: forced surfel
  } else if (node.marginal_surfel >= 1.0 - epsilon) {
    state = 0;
  } else {
    state = 1;
  }
  out.push_back(state);
  bool child_exists = exists && state == 1;
  for (const ProbNode& child : node.children)
    terminate_preorder(child, epsilon, child_exists, out);
}

}  // namespace

void marginal_probabilities(ProbTree& tree) {
  for (ProbNode& root : tree.roots) {
    // Top level: p~ = p, q~ = 1 - p.
    root.marginal_split = root.split_prob;
    root.marginal_surfel = 1.0 - root.split_prob;
    for (ProbNode& child : root.children)
      fill_marginals(child, root.marginal_split);
  }
}

ExpectedLoss expected_loss(const ProbTree& tree, double lambda,
                           size_t n_points) {
  if (n_points == 0)
    raise(ErrorCode::kEmptyInput, "expected_loss needs a nonzero point count");
  ExpectedLoss loss;
  for (const ProbNode& root : tree.roots)
    accumulate_loss(root, loss.distortion, loss.rate);
  loss.distortion /= static_cast<double>(n_points);
  loss.rate /= static_cast<double>(n_points);
  loss.total = lambda * loss.distortion + loss.rate;
  return loss;
}

std::vector<int8_t> epsilon_terminate(const ProbTree& tree, double epsilon) {
  if (epsilon <= 0.0 || epsilon >= 0.5)
    raise(ErrorCode::kInvalidArgument, "epsilon must be in (0, 0.5)");
  std::vector<int8_t> out;
  for (const ProbNode& root : tree.roots)
    terminate_preorder(root, epsilon, true, out);
  return out;
}

}  // namespace sfls
