// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one test per release criterion, each printing a
// single PASS/FAIL line. Run via ctest or directly.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "sfls/codec.hpp"
#include "sfls/metrics.hpp"
#include "sfls/synthetic.hpp"

using namespace sfls;

namespace {

void report(int number, const char* name, bool pass) {
  std::printf("[criterion %2d] %-28s %s\n", number, name,
              pass ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK(pass);
}

PointCloud random_cloud(std::mt19937_64& rng, int depth, size_t n) {
  std::vector<uint64_t> codes;
  for (size_t i = 0; i < n; ++i) codes.push_back(rng() % (1ULL << (3 * depth)));
  return PointCloud(depth, std::move(codes));
}

const std::vector<double> kLambdas = {0.1, 0.3, 0.8, 1.0, 1.5};

}  // namespace

TEST_CASE("criterion 1: bit-exact roundtrip") {
  std::mt19937_64 rng(101);
  bool pass = true;
  int clouds_done = 0;

  for (int trial = 0; trial < 50 && pass; ++trial) {
    PointCloud cloud;
    int depth = 5 + trial % 4;
    if (trial % 2 == 0) {
      cloud = random_cloud(rng, depth, 50 + rng() % 350);
    } else {
      Shape shape = static_cast<Shape>(trial % 3);
      double density = 0.5 + 0.5 * ((trial / 2) % 2);
      cloud = generate_cloud(shape, std::min(depth, 6), density, trial);
    }

    CodecConfig base;
    base.threads = 1;
    EncoderAnalysis seq = EncoderAnalysis::build(cloud, base);
    CodecConfig par = base;
    par.threads = 8;
    EncoderAnalysis con = EncoderAnalysis::build(cloud, par);

    for (double lambda : kLambdas) {
      CodecConfig cfg = base;
      cfg.lambda = lambda;
      EncodeResult enc = seq.realize(cfg);

      CodecConfig cfg8 = par;
      cfg8.lambda = lambda;
      if (con.realize(cfg8).bytes != enc.bytes) {
        pass = false;
        std::printf("  thread-count mismatch (trial %d, lambda %g)\n", trial,
                    lambda);
        break;
      }

      DecodeResult dec = decode(enc.bytes);
      if (dec.records != enc.records) {
        pass = false;
        std::printf("  record mismatch (trial %d, lambda %g)\n", trial,
                    lambda);
        break;
      }
    }
    ++clouds_done;
  }
  pass = pass && clouds_done >= 50;
  report(1, "bit-exact roundtrip", pass);
}

TEST_CASE("criterion 2: gradient correctness") {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = 1e-4;
  double worst = 0.0;
  int pairs = 0;

  for (int level : {1, 2}) {
    for (int trial = 0; trial < 60; ++trial) {
      NodeSample sample;
      sample.level = level;
      sample.occupancy.assign(1ULL << (3 * level), 0);
      for (auto& q : sample.occupancy)
        if (u(rng) < 0.3) {
          q = 1;
          ++sample.occupied;
        }
      if (sample.occupied == 0) {
        sample.occupancy[0] = 1;
        sample.occupied = 1;
      }

      double box = static_cast<double>(1 << level);
      FitState state;
      for (int i = 0; i < 3; ++i) {
        state.mu[i] = 0.2 * box + 0.6 * box * u(rng);
        state.s[i] = std::log(0.3 + u(rng) * (box - 0.3) - kSigmaMin);
      }
      double qn = 0.0;
      for (int i = 0; i < 4; ++i) {
        state.q[i] = g(rng);
        qn += state.q[i] * state.q[i];
      }
      qn = std::sqrt(qn);
      for (int i = 0; i < 4; ++i) state.q[i] /= qn;
      double beta = 0.9 + u(rng) * 4.1;
      double frac = (beta - kBetaMin) / (kBetaMax - kBetaMin);
      state.b = std::log(frac / (1.0 - frac));

      std::array<double, 11> analytic{};
      distortion_gradient(state, sample, kDefaultProbClamp, &analytic);

      auto eval = [&](int dim, double delta) {
        FitState s = state;
        if (dim < 3)
          s.mu[dim] += delta;
        else if (dim < 6)
          s.s[dim - 3] += delta;
        else if (dim < 10)
          s.q[dim - 6] += delta;
        else
          s.b += delta;
        return distortion_gradient(s, sample, kDefaultProbClamp, nullptr);
      };
      for (int dim = 0; dim < 11; ++dim) {
        double numeric = (eval(dim, h) - eval(dim, -h)) / (2.0 * h);
        double rel = std::abs(analytic[dim] - numeric) /
                     std::max({1.0, std::abs(analytic[dim]), std::abs(numeric)});
        worst = std::max(worst, rel);
      }
      ++pairs;
    }
  }
  std::printf("  %d pairs, worst relative error %.3g\n", pairs, worst);
  report(2, "gradient correctness", pairs >= 100 && worst < 1e-4);
}

TEST_CASE("criterion 3: DP optimality") {
  std::mt19937_64 rng(103);
  bool pass = true;
  int done = 0;
  uint64_t budget = 0;

  while (done < 200 && pass) {
    PointCloud cloud = random_cloud(rng, 4, 2 + rng() % 50);
    OccupancyOctree tree = OccupancyOctree::build(cloud);
    const int cut = 3, floor = 1;

    std::vector<std::pair<int, size_t>> free_nodes;
    for (int l = floor + 1; l <= cut; ++l)
      for (size_t i = 0; i < tree.level(l).size(); ++i)
        free_nodes.emplace_back(l, i);
    size_t k = free_nodes.size();
    if (k > 21) continue;
    if ((1ULL << k) + budget > (1ULL << 24)) continue;
    budget += 1ULL << k;

    CostTable costs(cut + 1);
    for (int l = floor; l <= cut; ++l) {
      costs[l].resize(tree.level(l).size());
      for (auto& c : costs[l]) {
        c.surfel = static_cast<double>(rng() % 4096);
        c.split_local = static_cast<double>(rng() % 4096);
      }
    }

    DecisionPlan plan = plan_decisions(tree, cut, floor, costs);

    // Exhaustive enumeration of all 2^k assignments.
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t bits = 0; bits < (1ULL << k); ++bits) {
      std::map<std::pair<int, size_t>, Decision> assign;
      for (size_t i = 0; i < k; ++i)
        assign[free_nodes[i]] =
            (bits >> i & 1) ? Decision::kSplit : Decision::kSurfel;

      struct Walker {
        const OccupancyOctree& tree;
        const CostTable& costs;
        const std::map<std::pair<int, size_t>, Decision>& assign;
        double eval(int l, size_t i) {
          if (l == 1 || assign.at({l, i}) == Decision::kSurfel)
            return costs[l][i].surfel;
          double total = costs[l][i].split_local;
          const LevelNode& node = tree.level(l)[i];
          for (int j = 0; j < 8; ++j) {
            if (!(node.mask >> j & 1)) continue;
            const auto& below = tree.level(l - 1);
            for (size_t ci = 0; ci < below.size(); ++ci)
              if (below[ci].morton == node.morton * 8 + j) {
                total += eval(l - 1, ci);
                break;
              }
          }
          return total;
        }
      } w{tree, costs, assign};

      double total = 0.0;
      for (size_t i = 0; i < tree.level(cut).size(); ++i)
        total += w.eval(cut, i);
      best = std::min(best, total);
    }

    if (plan.total_cost != best) {
      pass = false;
      std::printf("  mismatch: DP %.17g vs enumeration %.17g (k=%zu)\n",
                  plan.total_cost, best, k);
    }
    ++done;
  }
  pass = pass && done >= 200;
  report(3, "DP optimality", pass);
}

TEST_CASE("criterion 4: split-probability conservation") {
  std::mt19937_64 rng(104);
  bool pass = true;

  struct Gen {
    std::mt19937_64& rng;
    ProbNode make(int levels_left) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      ProbNode n;
      n.split_prob = u(rng);
      n.distortion = static_cast<double>(rng() % 1000);
      n.bits = static_cast<double>(rng() % 64);
      if (levels_left > 0) {
        size_t kids = 1 + rng() % 3;
        for (size_t i = 0; i < kids; ++i)
          n.children.push_back(make(levels_left - 1));
      }
      return n;
    }
  } gen{rng};

  struct Checker {
    bool ok = true;
    void conservation(const ProbNode& n) {
      for (const ProbNode& c : n.children) {
        if (std::abs(c.marginal_split + c.marginal_surfel - n.marginal_split) >
            1e-12)
          ok = false;
        conservation(c);
      }
    }
    void chains(const ProbNode& n, double acc) {
      acc += n.marginal_surfel;
      if (n.children.empty()) {
        if (std::abs(acc + n.marginal_split - 1.0) > 1e-12) ok = false;
        return;
      }
      for (const ProbNode& c : n.children) chains(c, acc);
    }
  };

  for (int trial = 0; trial < 1000 && pass; ++trial) {
    ProbTree tree;
    tree.roots.push_back(gen.make(static_cast<int>(rng() % 4)));
    marginal_probabilities(tree);
    Checker ck;
    if (std::abs(tree.roots[0].marginal_split + tree.roots[0].marginal_surfel -
                 1.0) > 1e-12)
      ck.ok = false;
    ck.conservation(tree.roots[0]);
    ck.chains(tree.roots[0], 0.0);
    pass = ck.ok;
  }

  // Hard trees: expected loss equals the realized loss exactly.
  for (int trial = 0; trial < 10 && pass; ++trial) {
    PointCloud cloud = random_cloud(rng, 4, 10 + rng() % 40);
    OccupancyOctree tree = OccupancyOctree::build(cloud);
    RateModel rate(ParamQuantizer{});
    FitConfig fit;
    fit.max_iters = 25;
    DecidedTree decided =
        decide_tree(tree, 0.2 + 0.3 * trial, 3, 1, rate, fit);

    struct Builder {
      const DecidedTree& t;
      const DecidedNode* find(int l, uint64_t m) const {
        for (const DecidedNode& dn : t.levels[l])
          if (dn.address.morton == m) return &dn;
        return nullptr;
      }
      ProbNode build(int l, uint64_t m) const {
        const DecidedNode* dn = find(l, m);
        ProbNode n;
        bool split = dn->decision == Decision::kSplit;
        n.split_prob = split ? 1.0 : 0.0;
        n.distortion = split ? 0.0 : dn->distortion;
        n.bits = split ? 9.0 : 0.0;
        if (split)
          for (int j = 0; j < 8; ++j)
            if (dn->mask >> j & 1) n.children.push_back(build(l - 1, m * 8 + j));
        return n;
      }
    } b{decided};

    ProbTree pt;
    for (const DecidedNode& root : decided.levels[decided.cut_level])
      pt.roots.push_back(b.build(decided.cut_level, root.address.morton));
    marginal_probabilities(pt);
    ExpectedLoss loss = expected_loss(pt, 1.0, cloud.size());

    struct Sum {
      double d = 0.0, bsum = 0.0;
      void walk(const ProbNode& n) {
        if (n.split_prob == 1.0)
          bsum += n.bits;
        else
          d += n.distortion;
        for (const ProbNode& c : n.children) walk(c);
      }
    } s;
    for (const ProbNode& r : pt.roots) s.walk(r);
    if (loss.distortion != s.d / static_cast<double>(cloud.size()) ||
        loss.rate != s.bsum / static_cast<double>(cloud.size()))
      pass = false;
  }
  report(4, "Eq-3 conservation", pass);
}

TEST_CASE("criterion 5: coder efficiency") {
  std::mt19937_64 rng(105);
  const size_t n = 100000;
  RangeEncoder enc;
  AdaptiveBitModel model;
  double estimated = 0.0;
  std::vector<int> bits(n);
  for (auto& b : bits) b = (rng() % 5) == 0 ? 1 : 0;
  for (int b : bits) {
    estimated += estimate_bits(model, b);
    enc.encode_bit(model, b);
  }
  std::vector<uint8_t> stream = enc.finish();
  double realized = static_cast<double>(stream.size()) * 8.0;

  double entropy = -(0.2 * std::log2(0.2) + 0.8 * std::log2(0.8));
  double bound = entropy * static_cast<double>(n);
  double excess = realized / bound - 1.0;
  double tracking = std::abs(realized - estimated) / estimated;
  std::printf("  realized %.0f bits vs bound %.0f (%.2f%%), estimate gap %.3f%%\n",
              realized, bound, 100.0 * excess, 100.0 * tracking);

  RangeDecoder dec(stream);
  AdaptiveBitModel dm;
  bool roundtrip = true;
  for (int b : bits)
    if (dec.decode_bit(dm) != b) {
      roundtrip = false;
      break;
    }
  report(5, "coder efficiency",
         roundtrip && std::abs(excess) < 0.02 && tracking < 0.005);
}

TEST_CASE("criterion 6: metric oracles") {
  std::mt19937_64 rng(106);
  bool pass = true;

  auto brute_pass = [](const PointCloud& from, const PointCloud& to) {
    std::vector<Coord3> fp = from.points(), tp = to.points();
    double sum = 0.0;
    for (const Coord3& a : fp) {
      int64_t best = -1;
      for (const Coord3& b : tp) {
        int64_t dx = (int64_t)a.x - b.x, dy = (int64_t)a.y - b.y,
                dz = (int64_t)a.z - b.z;
        int64_t d2 = dx * dx + dy * dy + dz * dz;
        if (best < 0 || d2 < best) best = d2;
      }
      sum += static_cast<double>(best);
    }
    return sum / static_cast<double>(fp.size());
  };

  for (int trial = 0; trial < 20 && pass; ++trial) {
    PointCloud a = random_cloud(rng, 5, 30 + rng() % 470);
    PointCloud b = random_cloud(rng, 5, 30 + rng() % 470);
    double peak = 31.0;

    double mse = std::max(brute_pass(a, b), brute_pass(b, a));
    double want = mse <= 0.0
                      ? kPsnrCap
                      : std::min(10.0 * std::log10(3.0 * peak * peak / mse),
                                 kPsnrCap);
    if (d1_psnr(a, b, peak) != want) pass = false;

    // D2 against the projection oracle.
    std::vector<Vec3> normals = estimate_normals(a, 9);
    std::vector<Coord3> rp = a.points(), cp = b.points();
    auto nn = [](const Coord3& q, const std::vector<Coord3>& pts) {
      size_t best = 0;
      int64_t best_d2 = -1;
      for (size_t i = 0; i < pts.size(); ++i) {
        int64_t dx = (int64_t)q.x - pts[i].x, dy = (int64_t)q.y - pts[i].y,
                dz = (int64_t)q.z - pts[i].z;
        int64_t d2 = dx * dx + dy * dy + dz * dz;
        if (best_d2 < 0 || d2 < best_d2) {
          best_d2 = d2;
          best = i;
        }
      }
      return best;
    };
    double sum_ab = 0.0;
    for (size_t i = 0; i < rp.size(); ++i) {
      const Coord3& q = cp[nn(rp[i], cp)];
      Vec3 e = {(double)rp[i].x - q.x, (double)rp[i].y - q.y,
                (double)rp[i].z - q.z};
      double pr = dot(e, normals[i]);
      sum_ab += pr * pr;
    }
    double sum_ba = 0.0;
    for (size_t i = 0; i < cp.size(); ++i) {
      size_t j = nn(cp[i], rp);
      Vec3 e = {(double)cp[i].x - rp[j].x, (double)cp[i].y - rp[j].y,
                (double)cp[i].z - rp[j].z};
      double pr = dot(e, normals[j]);
      sum_ba += pr * pr;
    }
    double mse2 = std::max(sum_ab / rp.size(), sum_ba / cp.size());
    double want2 = mse2 <= 0.0
                       ? kPsnrCap
                       : std::min(10.0 * std::log10(3.0 * peak * peak / mse2),
                                  kPsnrCap);
    if (d2_psnr(a, normals, b, peak) != want2) pass = false;
  }

  PointCloud p1 = PointCloud::from_points(10, {{100, 100, 100}});
  PointCloud p2 = PointCloud::from_points(10, {{100, 100, 101}});
  double two_point = d1_psnr(p1, p2, 1023.0);
  if (std::abs(two_point - 64.97) > 0.01) pass = false;

  report(6, "metric oracles", pass);
}

TEST_CASE("criterion 7: RD monotonicity sweep") {
  PointCloud cloud = generate_cloud(Shape::kSphere, 9, 1.0, 0);
  CodecConfig base;
  EncoderAnalysis analysis = EncoderAnalysis::build(cloud, base);
  double peak = 511.0;

  std::vector<double> bpps, d1s;
  for (double lambda : kLambdas) {
    CodecConfig cfg = base;
    cfg.lambda = lambda;
    EncodeResult enc = analysis.realize(cfg);
    DecodeResult dec = decode(enc.bytes);
    double d1 = d1_psnr(cloud, dec.cloud, peak);
    bpps.push_back(enc.stats.bpp);
    d1s.push_back(d1);
    std::printf("  lambda %-4g bpp %.6f d1 %.3f dB\n", lambda, enc.stats.bpp,
                d1);
  }

  bool pass = true;
  for (size_t i = 1; i < bpps.size(); ++i) {
    if (!(bpps[i] > bpps[i - 1])) pass = false;
    if (d1s[i] < d1s[i - 1] - 0.1) pass = false;
  }
  report(7, "RD monotonicity sweep", pass);
}

TEST_CASE("criterion 8: surfel planarity") {
  PointCloud plane = generate_cloud(Shape::kPlane, 7, 1.0, 0);
  OccupancyOctree tree = OccupancyOctree::build(plane);

  size_t planar = 0, total = 0;
  for (const LevelNode& node : tree.level(2)) {
    NodeSample sample = make_node_sample(tree, {2, node.morton});
    FitResult fit = fit_surfel(sample);
    ++total;
    if (planarity_ratio(fit.params) >= 5.0) ++planar;
  }
  double frac = static_cast<double>(planar) / static_cast<double>(total);
  std::printf("  %zu/%zu level-2 fits planar (%.1f%%)\n", planar, total,
              100.0 * frac);
  report(8, "surfel planarity", total > 100 && frac >= 0.9);
}

TEST_CASE("criterion 9: compression sanity") {
  PointCloud plane = generate_cloud(Shape::kPlane, 9, 1.0, 0);
  CodecConfig cfg;
  cfg.lambda = 1.0;
  EncodeResult enc = encode(plane, cfg);
  std::vector<uint8_t> lossless =
      encode_octree_lossless(OccupancyOctree::build(plane));
  std::printf("  surfel %zu bytes vs lossless octree %zu bytes\n",
              enc.bytes.size(), lossless.size());
  report(9, "compression sanity", enc.bytes.size() < lossless.size());
}

TEST_CASE("criterion 10: binarization contract") {
  std::mt19937_64 rng(110);
  bool pass = true;

  // Real roundtrips across rho.
  PointCloud cloud = generate_cloud(Shape::kCubeShell, 6, 1.0, 0);
  for (double rho : {0.5, 1.0, 2.0}) {
    CodecConfig cfg;
    cfg.rho = rho;
    cfg.fit.max_iters = 60;
    EncodeResult enc = encode(cloud, cfg);
    DecodeResult dec = decode(enc.bytes);
    uint64_t candidates = 0;
    for (const NodeRecord& r : dec.records)
      if (r.decision == Decision::kSurfel)
        candidates += 1ULL << (3 * r.address.level);
    uint64_t want = std::min<uint64_t>(
        static_cast<uint64_t>(std::floor(rho * cloud.size())), candidates);
    if (dec.cloud.size() != want) {
      pass = false;
      std::printf("  rho %g: got %zu want %llu\n", rho, dec.cloud.size(),
                  static_cast<unsigned long long>(want));
    }
  }

  // Tie-breaking against a full-sort oracle.
  for (int trial = 0; trial < 50 && pass; ++trial) {
    std::vector<Candidate> cands;
    size_t n = 20 + rng() % 400;
    for (size_t i = 0; i < n; ++i)
      cands.push_back({rng() % 8192, (rng() % 8) / 8.0 + 0.05});
    std::sort(cands.begin(), cands.end(),
              [](auto& a, auto& b) { return a.morton < b.morton; });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](auto& a, auto& b) {
                              return a.morton == b.morton;
                            }),
                cands.end());
    uint32_t keep = 1 + static_cast<uint32_t>(rng() % cands.size());

    PointCloud out = binarize(cands, keep, 1.0, 5);
    std::vector<Candidate> sorted = cands;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) {
      if (a.probability != b.probability)
        return a.probability > b.probability;
      return a.morton < b.morton;
    });
    std::vector<uint64_t> want;
    for (size_t i = 0; i < keep; ++i) want.push_back(sorted[i].morton);
    std::sort(want.begin(), want.end());
    if (out.codes() != want) pass = false;
  }

  report(10, "binarization contract", pass);
}
