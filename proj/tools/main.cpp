// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the surfelsoup codec. Talks to the shared
// library exclusively through the C interface in surfelsoup.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surfelsoup.h"

namespace {

constexpr int kExitCodec = 1;
constexpr int kExitUsage = 2;

struct CloudDeleter {
  void operator()(sfls_cloud* c) const { sfls_cloud_free(c); }
};
struct BufferDeleter {
  void operator()(sfls_buffer* b) const { sfls_buffer_free(b); }
};
using CloudPtr = std::unique_ptr<sfls_cloud, CloudDeleter>;
using BufferPtr = std::unique_ptr<sfls_buffer, BufferDeleter>;

[[noreturn]] void fail(sfls_status status) {
  std::fprintf(stderr, "error: %s (%s)\n", sfls_last_error(),
               sfls_status_name(status));
  bool usage = status == SFLS_ERR_IO || status == SFLS_ERR_PARSE ||
               status == SFLS_ERR_INVALID_ARGUMENT;
  std::exit(usage ? kExitUsage : kExitCodec);
}

void check(sfls_status status) {
  if (status != SFLS_OK) fail(status);
}

CloudPtr load_cloud(const std::string& path, int depth) {
  sfls_cloud* c = nullptr;
  check(sfls_cloud_load_ply(path.c_str(), depth, &c));
  return CloudPtr(c);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
    std::exit(kExitUsage);
  }
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const uint8_t* data, size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out ||
      !out.write(reinterpret_cast<const char*>(data),
                 static_cast<std::streamsize>(size))) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(kExitUsage);
  }
}

void print_encode_stats(const sfls_encode_stats& stats) {
  std::printf("bpp: %.6f (%llu bytes)\n", stats.bpp,
              static_cast<unsigned long long>(stats.total_bytes));
  std::printf("bit composition (est): octree %.1f, surfel %.1f, flags %.1f\n",
              stats.octant_bits, stats.surfel_bits, stats.flag_bits);
  for (int l = SFLS_MAX_LEVELS - 1; l >= 0; --l) {
    if (stats.surfels_per_level[l] == 0 && stats.splits_per_level[l] == 0)
      continue;
    std::printf("level %2d: %u surfel, %u split\n", l,
                stats.surfels_per_level[l], stats.splits_per_level[l]);
  }
}

struct EncodeFlags {
  double lambda = 1.0;
  int depth = -1;
  int levels = 3;
  int floor_level = 1;
  double rho = 1.0;
  int fit_iters = 300;
  uint64_t seed = 0;
};

sfls_encoder_config make_config(const EncodeFlags& f) {
  sfls_encoder_config cfg;
  sfls_encoder_config_init(&cfg);
  cfg.lambda = f.lambda;
  cfg.levels = f.levels;
  cfg.floor_level = f.floor_level;
  cfg.rho = f.rho;
  cfg.fit_iters = f.fit_iters;
  cfg.seed = f.seed;
  return cfg;
}

void add_encode_flags(CLI::App* cmd, EncodeFlags& f) {
  cmd->add_option("--lambda", f.lambda, "rate-distortion weight");
  cmd->add_option("--depth", f.depth, "declared input bit depth");
  cmd->add_option("--levels", f.levels, "highest decision level L");
  cmd->add_option("--floor", f.floor_level, "forced-surfel level");
  cmd->add_option("--rho", f.rho, "binarization scale");
  cmd->add_option("--fit-iters", f.fit_iters, "surfel fit iterations");
  cmd->add_option("--seed", f.seed, "fit seed");
}

int run_eval(const std::string& ref_path, const std::string& rec_path,
             double peak, bool peak_set) {
  CloudPtr ref = load_cloud(ref_path, -1);
  CloudPtr rec = load_cloud(rec_path, -1);
  if (!peak_set && sfls_cloud_depth(ref.get()) != sfls_cloud_depth(rec.get())) {
    std::fprintf(stderr,
                 "warning: depth mismatch (%d vs %d); using peak from the "
                 "reference\n",
                 sfls_cloud_depth(ref.get()), sfls_cloud_depth(rec.get()));
  }
  double use_peak = peak_set ? peak : 0.0;
  double d1 = 0.0, d2 = 0.0;
  check(sfls_metric_d1(ref.get(), rec.get(), use_peak, &d1));
  check(sfls_metric_d2(ref.get(), rec.get(), use_peak, 0, &d2));
  std::printf("D1 %.6f dB\nD2 %.6f dB\n", d1, d2);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surfelsoup point cloud geometry codec"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic test cloud");
  std::string gen_shape;
  int gen_depth = 6;
  double gen_density = 1.0;
  uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("shape", gen_shape, "plane | sphere | cube-shell")
      ->required();
  gen->add_option("--depth", gen_depth, "bit depth in [4, 12]");
  gen->add_option("--density", gen_density, "keep probability in (0, 1]");
  gen->add_option("--seed", gen_seed, "subsampling seed");
  gen->add_option("--out", gen_out, "output PLY path")->required();

  // encode
  auto* enc = app.add_subcommand("encode", "encode a PLY cloud to .sfls");
  std::string enc_in, enc_out;
  EncodeFlags enc_flags;
  enc->add_option("input", enc_in, "input PLY")->required();
  enc->add_option("output", enc_out, "output .sfls")->required();
  add_encode_flags(enc, enc_flags);

  // decode
  auto* dec = app.add_subcommand("decode", "decode an .sfls stream to PLY");
  std::string dec_in, dec_out;
  dec->add_option("input", dec_in, "input .sfls")->required();
  dec->add_option("output", dec_out, "output PLY")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "D1/D2 PSNR between two clouds");
  std::string ev_ref, ev_rec;
  double ev_peak = 0.0;
  ev->add_option("ref", ev_ref, "reference PLY")->required();
  ev->add_option("rec", ev_rec, "reconstruction PLY")->required();
  auto* peak_opt = ev->add_option("--peak", ev_peak, "PSNR peak value");

  // sweep
  auto* sw = app.add_subcommand("sweep", "rate-distortion sweep over lambda");
  std::string sw_in, sw_out;
  std::vector<double> sw_lambdas;
  EncodeFlags sw_flags;
  sw->add_option("input", sw_in, "input PLY")->required();
  sw->add_option("--out", sw_out, "output CSV path")->required();
  sw->add_option("--lambda", sw_lambdas, "lambda values (ascending)");
  sw->add_option("--depth", sw_flags.depth, "declared input bit depth");
  sw->add_option("--levels", sw_flags.levels, "highest decision level L");
  sw->add_option("--floor", sw_flags.floor_level, "forced-surfel level");
  sw->add_option("--rho", sw_flags.rho, "binarization scale");
  sw->add_option("--fit-iters", sw_flags.fit_iters, "surfel fit iterations");
  sw->add_option("--seed", sw_flags.seed, "fit seed");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    sfls_shape shape;
    if (gen_shape == "plane")
      shape = SFLS_SHAPE_PLANE;
    else if (gen_shape == "sphere")
      shape = SFLS_SHAPE_SPHERE;
    else if (gen_shape == "cube-shell")
      shape = SFLS_SHAPE_CUBE_SHELL;
    else {
      std::fprintf(stderr, "error: unknown shape '%s'\n", gen_shape.c_str());
      return kExitUsage;
    }
    sfls_cloud* cloud = nullptr;
    check(sfls_generate(shape, gen_depth, gen_density, gen_seed, &cloud));
    CloudPtr holder(cloud);
    check(sfls_cloud_save_ply(cloud, gen_out.c_str()));
    std::printf("%zu points -> %s\n", sfls_cloud_size(cloud), gen_out.c_str());
    return 0;
  }

  if (enc->parsed()) {
    CloudPtr cloud = load_cloud(enc_in, enc_flags.depth);
    sfls_encoder_config cfg = make_config(enc_flags);
    sfls_buffer* buf = nullptr;
    sfls_encode_stats stats;
    check(sfls_encode(cloud.get(), &cfg, &buf, &stats));
    BufferPtr holder(buf);
    write_file(enc_out, sfls_buffer_data(buf), sfls_buffer_size(buf));
    print_encode_stats(stats);
    return 0;
  }

  if (dec->parsed()) {
    std::vector<uint8_t> bytes = read_file(dec_in);
    sfls_cloud* cloud = nullptr;
    check(sfls_decode(bytes.data(), bytes.size(), &cloud));
    CloudPtr holder(cloud);
    check(sfls_cloud_save_ply(cloud, dec_out.c_str()));
    std::printf("%zu points\n", sfls_cloud_size(cloud));
    return 0;
  }

  if (ev->parsed()) return run_eval(ev_ref, ev_rec, ev_peak, peak_opt->count() > 0);

  if (sw->parsed()) {
    if (sw_lambdas.empty()) sw_lambdas = {0.1, 0.3, 0.8, 1.0, 1.5};
    for (size_t i = 1; i < sw_lambdas.size(); ++i) {
      if (sw_lambdas[i] <= sw_lambdas[i - 1] || sw_lambdas[i - 1] <= 0.0) {
        std::fprintf(stderr, "error: lambdas must be positive ascending\n");
        return kExitUsage;
      }
    }
    CloudPtr cloud = load_cloud(sw_in, sw_flags.depth);
    std::ofstream csv(sw_out);
    if (!csv) {
      std::fprintf(stderr, "error: cannot write %s\n", sw_out.c_str());
      return kExitUsage;
    }
    csv << "lambda,bpp,d1_db,d2_db,octree_bits,surfel_bits,flag_bits\n"
        << std::flush;
    for (double lambda : sw_lambdas) {
      EncodeFlags f = sw_flags;
      f.lambda = lambda;
      sfls_encoder_config cfg = make_config(f);
      sfls_buffer* buf = nullptr;
      sfls_encode_stats stats;
      check(sfls_encode(cloud.get(), &cfg, &buf, &stats));
      BufferPtr holder(buf);
      sfls_cloud* rec = nullptr;
      check(sfls_decode(sfls_buffer_data(buf), sfls_buffer_size(buf), &rec));
      CloudPtr rec_holder(rec);
      double d1 = 0.0, d2 = 0.0;
      check(sfls_metric_d1(cloud.get(), rec, 0.0, &d1));
      check(sfls_metric_d2(cloud.get(), rec, 0.0, 0, &d2));
      char row[256];
      std::snprintf(row, sizeof(row), "%g,%.6f,%.6f,%.6f,%.1f,%.1f,%.1f\n",
                    lambda, stats.bpp, d1, d2, stats.octant_bits,
                    stats.surfel_bits, stats.flag_bits);
      csv << row << std::flush;
      std::printf("lambda %g: %s", lambda, row);
    }
    return 0;
  }

  return kExitUsage;
}
