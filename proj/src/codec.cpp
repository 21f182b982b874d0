// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "sfls/parallel.hpp"

namespace sfls {

namespace {

constexpr uint8_t kMagic[4] = {'S', 'F', 'L', 'S'};
constexpr uint8_t kVersion = 1;
constexpr size_t kHeaderSize = 19;

uint8_t lambda_tag_of(double lambda) {
  double t = std::nearbyint(lambda * 32.0);
  return static_cast<uint8_t>(std::min(std::max(t, 0.0), 255.0));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t get_u32(std::span<const uint8_t> in, size_t at) {
  return static_cast<uint32_t>(in[at]) | (static_cast<uint32_t>(in[at + 1]) << 8) |
         (static_cast<uint32_t>(in[at + 2]) << 16) |
         (static_cast<uint32_t>(in[at + 3]) << 24);
}

void validate_config(const CodecConfig& c, int depth, size_t n_points) {
  if (c.cut_level < 1 || c.floor_level < 1 || c.floor_level > c.cut_level)
    raise(ErrorCode::kInvalidArgument, "invalid cut/floor levels");
  if (depth < c.cut_level + 1)
    raise(ErrorCode::kInvalidArgument,
          "cloud depth must exceed the cut level");
  if (c.lambda < 0.0)
    raise(ErrorCode::kInvalidArgument, "lambda must be nonnegative");
  double rho_q10 = std::nearbyint(c.rho * 1024.0);
  if (rho_q10 < 1.0 || rho_q10 > 65535.0)
    raise(ErrorCode::kInvalidArgument, "rho out of range");
  if (static_cast<uint64_t>(rho_q10) * n_points < 1024)
    raise(ErrorCode::kInvalidArgument, "rho selects zero output points");
  if (n_points > 0xffffffffULL)
    raise(ErrorCode::kInvalidArgument, "too many points for the header");
}

std::vector<uint8_t> write_header(const CodecConfig& c, int depth,
                                  uint32_t n_points) {
  std::vector<uint8_t> out;
  out.reserve(kHeaderSize);
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(static_cast<uint8_t>(depth));
  out.push_back(static_cast<uint8_t>(c.cut_level));
  out.push_back(static_cast<uint8_t>(c.floor_level));
  put_u32(out, n_points);
  uint16_t rho_q10 = static_cast<uint16_t>(std::nearbyint(c.rho * 1024.0));
  out.push_back(static_cast<uint8_t>(rho_q10));
  out.push_back(static_cast<uint8_t>(rho_q10 >> 8));
  out.push_back(static_cast<uint8_t>(c.quantizer.mu_bits));
  out.push_back(static_cast<uint8_t>(c.quantizer.sigma_bits));
  out.push_back(static_cast<uint8_t>(c.quantizer.quat_bits));
  out.push_back(static_cast<uint8_t>(c.quantizer.beta_bits));
  out.push_back(lambda_tag_of(c.lambda));
  return out;
}

struct TravNode {
  uint64_t morton = 0;
  int parent_popcount = OctantCoder::kRootParentPopcount;
};

ptrdiff_t level_index_of(const std::vector<LevelNode>& nodes,
                         uint64_t morton) {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), morton,
      [](const LevelNode& n, uint64_t m) { return n.morton < m; });
  if (it == nodes.end() || it->morton != morton)
    raise(ErrorCode::kInternal, "traversal out of sync with octree");
  return it - nodes.begin();
}

}  // namespace

EncoderAnalysis EncoderAnalysis::build(const PointCloud& cloud,
                                       const CodecConfig& config) {
  if (cloud.empty()) raise(ErrorCode::kEmptyInput, "empty cloud");
  validate_config(config, cloud.depth(), cloud.size());

  EncoderAnalysis a;
  a.octree_ = OccupancyOctree::build(cloud);
  a.n_points_ = static_cast<uint32_t>(cloud.size());
  a.cut_level_ = config.cut_level;
  a.floor_level_ = config.floor_level;
  a.rate_model_ = RateModel(config.quantizer);

  int depth = a.octree_.depth();
  int threads = resolve_thread_count(config.threads);

  // Parent mask popcounts for every node of every level below the root.
  a.parent_popcounts_.resize(depth + 1);
  for (int l = 1; l <= depth; ++l) {
    const auto& nodes = a.octree_.level(l);
    auto& out = a.parent_popcounts_[l];
    out.resize(nodes.size(), OctantCoder::kRootParentPopcount);
    if (l == depth) continue;
    const auto& parents = a.octree_.level(l + 1);
    for (size_t i = 0; i < nodes.size(); ++i) {
      ptrdiff_t pi = level_index_of(parents, nodes[i].morton >> 3);
      out[i] = std::popcount(parents[pi].mask);
    }
  }

  // Fit every decidable node; each fit is independent.
  a.fits_.resize(config.cut_level + 1);
  for (int l = config.floor_level; l <= config.cut_level; ++l) {
    const auto& nodes = a.octree_.level(l);
    a.fits_[l].resize(nodes.size());
    parallel_for(nodes.size(), threads, [&](size_t i) {
      NodeAddress addr{l, nodes[i].morton};
      NodeSample sample = make_node_sample(a.octree_, addr);
      FitResult fit = fit_surfel(sample, config.fit);
      FittedNode& fn = a.fits_[l][i];
      fn.tuple = quantize_params(fit.params, l, config.quantizer, &fn.clamped);
      fn.params = dequantize_params(fn.tuple, l, config.quantizer);
      fn.distortion = node_distortion(fn.params, sample, config.fit.p_min);
    });
  }

  // Calibration pass: adapt fresh models over the whole octree (masks) and
  // over all decidable fits (params) in coding order, then freeze snapshots
  // for order-independent rate estimates.
  OctantCoder octant_cal;
  for (int l = depth; l > config.floor_level; --l) {
    const auto& nodes = a.octree_.level(l);
    for (size_t i = 0; i < nodes.size(); ++i)
      octant_cal.adapt(l, a.parent_popcounts_[l][i], nodes[i].mask);
  }
  ParamCoder param_cal(config.quantizer);
  for (int l = config.cut_level; l >= config.floor_level; --l) {
    for (const FittedNode& fn : a.fits_[l]) param_cal.adapt(l, fn.tuple);
  }
  a.rate_model_.set_snapshots(octant_cal, param_cal);

  for (int l = config.floor_level; l <= config.cut_level; ++l) {
    const auto& nodes = a.octree_.level(l);
    for (size_t i = 0; i < nodes.size(); ++i) {
      FittedNode& fn = a.fits_[l][i];
      fn.param_bits = a.rate_model_.param_bits(l, fn.tuple);
      fn.octant_bits = a.rate_model_.octant_bits(
          l, a.parent_popcounts_[l][i], nodes[i].mask);
    }
  }
  return a;
}

EncodeResult EncoderAnalysis::realize(const CodecConfig& config) const {
  validate_config(config, octree_.depth(), n_points_);
  if (config.cut_level != cut_level_ || config.floor_level != floor_level_ ||
      !(config.quantizer == rate_model_.quantizer()))
    raise(ErrorCode::kInvalidArgument,
          "codec structure differs from the analyzed configuration");

  int depth = octree_.depth();
  double lambda_scale = config.lambda / std::numbers::ln2;

  CostTable costs(cut_level_ + 1);
  for (int l = floor_level_; l <= cut_level_; ++l) {
    costs[l].resize(fits_[l].size());
    for (size_t i = 0; i < fits_[l].size(); ++i) {
      const FittedNode& fn = fits_[l][i];
      double flag = l == floor_level_ ? 0.0 : rate_model_.flag_bits();
      costs[l][i].surfel = lambda_scale * fn.distortion + fn.param_bits + flag;
      costs[l][i].split_local = flag + fn.octant_bits;
    }
  }

  DecisionPlan plan = plan_decisions(octree_, cut_level_, floor_level_, costs);
  DecidedTree tree = realize_decisions(
      octree_, plan, config.lambda,
      [&](const NodeAddress& addr, size_t i, DecidedNode& dn) {
        const FittedNode& fn = fits_[addr.level][i];
        dn.tuple = fn.tuple;
        dn.params = fn.params;
        dn.distortion = fn.distortion;
      });

  EncodeResult result;
  result.tree = std::move(tree);
  result.bytes = write_header(config, depth, n_points_);
  result.stats.clamped_params = 0;
  for (int l = floor_level_; l <= cut_level_; ++l)
    for (const FittedNode& fn : fits_[l])
      result.stats.clamped_params += fn.clamped;

  RangeEncoder enc;
  OctantCoder octants;
  ParamCoder params(config.quantizer);
  std::array<AdaptiveBitModel, kMaxDepth + 1> flag_models;
  EncodeStats& stats = result.stats;

  std::vector<TravNode> current = {
      {0, OctantCoder::kRootParentPopcount}};
  for (int l = depth; l >= floor_level_ && !current.empty(); --l) {
    std::vector<TravNode> next;
    const auto& level_nodes = octree_.level(l);
    size_t decided_i = 0;
    for (const TravNode& tn : current) {
      NodeRecord rec;
      rec.address = {l, tn.morton};
      if (l > cut_level_) {
        ptrdiff_t idx = level_index_of(level_nodes, tn.morton);
        uint8_t mask = level_nodes[idx].mask;
        stats.octant_bits += octants.estimate(l, tn.parent_popcount, mask);
        octants.encode(enc, l, tn.parent_popcount, mask);
        stats.levels[l].splits++;
        rec.decision = Decision::kSplit;
        rec.mask = mask;
        int child_ppc = std::popcount(mask);
        for (int j = 0; j < 8; ++j)
          if (mask >> j & 1) next.push_back({tn.morton * 8 + j, child_ppc});
      } else {
        const DecidedNode& dn = result.tree.levels[l][decided_i++];
        if (dn.address.morton != tn.morton)
          raise(ErrorCode::kInternal, "decided tree out of sync");
        bool is_surfel = dn.decision == Decision::kSurfel;
        if (l > floor_level_) {
          stats.flag_bits += estimate_bits(flag_models[l], is_surfel);
          enc.encode_bit(flag_models[l], is_surfel);
        }
        rec.decision = dn.decision;
        if (is_surfel) {
          stats.surfel_bits += params.estimate(l, dn.tuple);
          params.encode(enc, l, dn.tuple);
          stats.levels[l].surfels++;
          rec.tuple = dn.tuple;
        } else {
          stats.octant_bits +=
              octants.estimate(l, tn.parent_popcount, dn.mask);
          octants.encode(enc, l, tn.parent_popcount, dn.mask);
          stats.levels[l].splits++;
          rec.mask = dn.mask;
          int child_ppc = std::popcount(dn.mask);
          for (int j = 0; j < 8; ++j)
            if (dn.mask >> j & 1) next.push_back({tn.morton * 8 + j, child_ppc});
        }
      }
      result.records.push_back(rec);
    }
    current = std::move(next);
  }

  std::vector<uint8_t> body = enc.finish();
  result.bytes.insert(result.bytes.end(), body.begin(), body.end());
  stats.total_bytes = result.bytes.size();
  stats.bpp = static_cast<double>(stats.total_bytes) * 8.0 /
              static_cast<double>(n_points_);
  return result;
}

EncodeResult encode(const PointCloud& cloud, const CodecConfig& config) {
  return EncoderAnalysis::build(cloud, config).realize(config);
}

std::vector<Candidate> voxelize_leaf(const NodeAddress& leaf,
                                     const SurfelParams& params, int depth) {
  if (leaf.level < 0 || leaf.level > depth)
    raise(ErrorCode::kInvalidArgument, "leaf level out of range");
  std::vector<Candidate> out;
  if (leaf.level == 0) {
    out.push_back({leaf.morton, 1.0});
    return out;
  }
  uint64_t base = leaf.morton << (3 * leaf.level);
  uint64_t count = 1ULL << (3 * leaf.level);
  out.reserve(count);
  Mat3 rot = rotation_from_quaternion(params.quat);
  Vec3 weights;
  for (int i = 0; i < 3; ++i)
    weights[i] = 1.0 / (params.sigma[i] * params.sigma[i]);
  double half_beta = 0.5 * params.beta;
  for (uint64_t k = 0; k < count; ++k) {
    Coord3 c = morton_decode(k, leaf.level);
    Vec3 d = Vec3{static_cast<double>(c.x), static_cast<double>(c.y),
                  static_cast<double>(c.z)} -
             params.mu;
    Vec3 y = rot.transposed_mul(d);
    double r2 = weights.x * y.x * y.x + weights.y * y.y * y.y +
                weights.z * y.z * y.z;
    double p = r2 <= 0.0 ? 1.0 : std::exp(-0.5 * std::pow(r2, half_beta));
    out.push_back({base + k, p});
  }
  return out;
}

PointCloud binarize(std::vector<Candidate> candidates, uint32_t n_original,
                    double rho, int depth) {
  if (candidates.empty())
    raise(ErrorCode::kEmptyInput, "no reconstruction candidates");
  uint64_t keep = static_cast<uint64_t>(
      std::floor(rho * static_cast<double>(n_original)));
  if (keep == 0)
    raise(ErrorCode::kEmptySelection, "rho * N selects zero points");

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.morton < b.morton;
  };
  if (keep < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + keep,
                     candidates.end(), better);
    candidates.resize(keep);
  }
  std::vector<uint64_t> codes;
  codes.reserve(candidates.size());
  for (const Candidate& c : candidates) codes.push_back(c.morton);
  return PointCloud(depth, std::move(codes));
}

DecodeResult decode(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHeaderSize)
    raise(ErrorCode::kTruncatedStream, "stream shorter than header");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin()))
    raise(ErrorCode::kCorruptStream, "bad magic");
  if (bytes[4] != kVersion)
    raise(ErrorCode::kCorruptStream, "unsupported version");

  DecodeResult result;
  result.depth = bytes[5];
  result.cut_level = bytes[6];
  result.floor_level = bytes[7];
  result.n_points = get_u32(bytes, 8);
  uint16_t rho_q10 = static_cast<uint16_t>(bytes[12]) |
                     (static_cast<uint16_t>(bytes[13]) << 8);
  result.rho = static_cast<double>(rho_q10) / 1024.0;
  ParamQuantizer quant;
  quant.mu_bits = bytes[14];
  quant.sigma_bits = bytes[15];
  quant.quat_bits = bytes[16];
  quant.beta_bits = bytes[17];
  result.lambda_tag = bytes[18];

  if (result.depth < 1 || result.depth > kMaxDepth ||
      result.cut_level < 1 || result.cut_level >= result.depth ||
      result.floor_level < 1 || result.floor_level > result.cut_level ||
      result.n_points == 0 || quant.mu_bits < 1 || quant.mu_bits > 14 ||
      quant.sigma_bits < 1 || quant.sigma_bits > 14 || quant.quat_bits < 2 ||
      quant.quat_bits > 14 || quant.beta_bits < 1 || quant.beta_bits > 14)
    raise(ErrorCode::kCorruptStream, "invalid header fields");

  RangeDecoder dec(bytes.subspan(kHeaderSize));
  OctantCoder octants;
  ParamCoder params(quant);
  std::array<AdaptiveBitModel, kMaxDepth + 1> flag_models;

  struct Leaf {
    NodeAddress address;
    SurfelParams params;
  };
  std::vector<Leaf> leaves;

  std::vector<TravNode> current = {
      {0, OctantCoder::kRootParentPopcount}};
  for (int l = result.depth; l >= result.floor_level && !current.empty();
       --l) {
    std::vector<TravNode> next;
    for (const TravNode& tn : current) {
      NodeRecord rec;
      rec.address = {l, tn.morton};
      bool is_surfel;
      if (l > result.cut_level) {
        is_surfel = false;
      } else if (l > result.floor_level) {
        is_surfel = dec.decode_bit(flag_models[l]) != 0;
      } else {
        is_surfel = true;
      }
      if (is_surfel) {
        rec.decision = Decision::kSurfel;
        rec.tuple = params.decode(dec, l);
        leaves.push_back(
            {rec.address, dequantize_params(rec.tuple, l, quant)});
      } else {
        rec.decision = Decision::kSplit;
        uint8_t mask = octants.decode(dec, l, tn.parent_popcount);
        rec.mask = mask;
        int child_ppc = std::popcount(mask);
        for (int j = 0; j < 8; ++j)
          if (mask >> j & 1) next.push_back({tn.morton * 8 + j, child_ppc});
      }
      result.records.push_back(rec);
    }
    current = std::move(next);
  }

  std::vector<Candidate> candidates;
  for (const Leaf& leaf : leaves) {
    std::vector<Candidate> c =
        voxelize_leaf(leaf.address, leaf.params, result.depth);
    candidates.insert(candidates.end(), c.begin(), c.end());
  }
  result.cloud =
      binarize(std::move(candidates), result.n_points, result.rho, result.depth);
  return result;
}

std::vector<uint8_t> encode_octree_lossless(const OccupancyOctree& tree) {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(tree.depth()));
  put_u32(out, static_cast<uint32_t>(tree.leaf_codes().size()));

  RangeEncoder enc;
  OctantCoder octants;
  std::vector<TravNode> current = {
      {0, OctantCoder::kRootParentPopcount}};
  for (int l = tree.depth(); l >= 1 && !current.empty(); --l) {
    std::vector<TravNode> next;
    const auto& nodes = tree.level(l);
    for (const TravNode& tn : current) {
      ptrdiff_t idx = level_index_of(nodes, tn.morton);
      uint8_t mask = nodes[idx].mask;
      octants.encode(enc, l, tn.parent_popcount, mask);
      int child_ppc = std::popcount(mask);
      if (l > 1)
        for (int j = 0; j < 8; ++j)
          if (mask >> j & 1) next.push_back({tn.morton * 8 + j, child_ppc});
    }
    current = std::move(next);
  }
  std::vector<uint8_t> body = enc.finish();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

PointCloud decode_octree_lossless(std::span<const uint8_t> bytes) {
  if (bytes.size() < 5)
    raise(ErrorCode::kTruncatedStream, "lossless stream too short");
  int depth = bytes[0];
  check_depth(depth);
  uint32_t n = get_u32(bytes, 1);

  RangeDecoder dec(bytes.subspan(5));
  OctantCoder octants;
  std::vector<uint64_t> codes;
  codes.reserve(n);
  std::vector<TravNode> current = {
      {0, OctantCoder::kRootParentPopcount}};
  for (int l = depth; l >= 1 && !current.empty(); --l) {
    std::vector<TravNode> next;
    for (const TravNode& tn : current) {
      uint8_t mask = octants.decode(dec, l, tn.parent_popcount);
      int child_ppc = std::popcount(mask);
      for (int j = 0; j < 8; ++j) {
        if (!(mask >> j & 1)) continue;
        if (l > 1)
          next.push_back({tn.morton * 8 + j, child_ppc});
        else
          codes.push_back(tn.morton * 8 + j);
      }
    }
    current = std::move(next);
  }
  if (codes.size() != n)
    raise(ErrorCode::kCorruptStream, "decoded point count mismatch");
  return PointCloud(depth, std::move(codes));
}

}  // namespace sfls
