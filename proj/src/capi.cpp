// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "surfelsoup.h"

#include <cstring>
#include <string>

#include "sfls/codec.hpp"
#include "sfls/metrics.hpp"
#include "sfls/ply_io.hpp"
#include "sfls/synthetic.hpp"

struct sfls_cloud {
  sfls::PointCloud cloud;
};

struct sfls_buffer {
  std::vector<uint8_t> bytes;
};

namespace {

thread_local std::string t_last_error;

sfls_status map_code(sfls::ErrorCode code) {
  using sfls::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return SFLS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kRange:
      return SFLS_ERR_RANGE;
    case ErrorCode::kEmptyInput:
    case ErrorCode::kEmptySelection:
      return SFLS_ERR_EMPTY_INPUT;
    case ErrorCode::kParse:
      return SFLS_ERR_PARSE;
    case ErrorCode::kIo:
      return SFLS_ERR_IO;
    case ErrorCode::kTruncatedStream:
      return SFLS_ERR_TRUNCATED_STREAM;
    case ErrorCode::kCorruptStream:
    case ErrorCode::kDegenerateNode:
    case ErrorCode::kDegenerateParameter:
      return SFLS_ERR_CORRUPT_STREAM;
    case ErrorCode::kInternal:
      return SFLS_ERR_INTERNAL;
  }
  return SFLS_ERR_INTERNAL;
}

template <typename Fn>
sfls_status guarded(Fn&& fn) {
  try {
    fn();
    return SFLS_OK;
  } catch (const sfls::Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SFLS_ERR_INTERNAL;
  }
}

sfls_status invalid(const char* message) {
  t_last_error = message;
  return SFLS_ERR_INVALID_ARGUMENT;
}

sfls::CodecConfig to_codec_config(const sfls_encoder_config& c) {
  sfls::CodecConfig out;
  out.lambda = c.lambda;
  out.cut_level = c.levels;
  out.floor_level = c.floor_level;
  out.rho = c.rho;
  if (c.fit_iters > 0) out.fit.max_iters = c.fit_iters;
  if (c.fit_step > 0.0) out.fit.step_size = c.fit_step;
  out.fit.seed = c.seed;
  out.threads = c.threads;
  return out;
}

}  // namespace

extern "C" {

const char* sfls_status_name(sfls_status status) {
  switch (status) {
    case SFLS_OK:
      return "ok";
    case SFLS_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case SFLS_ERR_RANGE:
      return "range";
    case SFLS_ERR_EMPTY_INPUT:
      return "empty_input";
    case SFLS_ERR_PARSE:
      return "parse";
    case SFLS_ERR_IO:
      return "io";
    case SFLS_ERR_TRUNCATED_STREAM:
      return "truncated_stream";
    case SFLS_ERR_CORRUPT_STREAM:
      return "corrupt_stream";
    case SFLS_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* sfls_last_error(void) { return t_last_error.c_str(); }

sfls_status sfls_cloud_load_ply(const char* path, int depth,
                                sfls_cloud** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new sfls_cloud{sfls::load_ply(path, depth)}; });
}

sfls_status sfls_cloud_save_ply(const sfls_cloud* cloud, const char* path) {
  if (!cloud || !path) return invalid("null argument");
  return guarded([&] { sfls::save_ply(cloud->cloud, path); });
}

sfls_status sfls_cloud_create(const uint32_t* xyz, size_t count, int depth,
                              sfls_cloud** out) {
  if (!xyz || !out) return invalid("null argument");
  return guarded([&] {
    std::vector<sfls::Coord3> pts(count);
    for (size_t i = 0; i < count; ++i)
      pts[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
    *out = new sfls_cloud{sfls::PointCloud::from_points(depth, pts)};
  });
}

size_t sfls_cloud_size(const sfls_cloud* cloud) {
  return cloud ? cloud->cloud.size() : 0;
}

int sfls_cloud_depth(const sfls_cloud* cloud) {
  return cloud ? cloud->cloud.depth() : 0;
}

sfls_status sfls_cloud_points(const sfls_cloud* cloud, uint32_t* xyz_out) {
  if (!cloud || !xyz_out) return invalid("null argument");
  return guarded([&] {
    size_t i = 0;
    for (uint64_t code : cloud->cloud.codes()) {
      sfls::Coord3 p = sfls::morton_decode(code, cloud->cloud.depth());
      xyz_out[i++] = p.x;
      xyz_out[i++] = p.y;
      xyz_out[i++] = p.z;
    }
  });
}

void sfls_cloud_free(sfls_cloud* cloud) { delete cloud; }

sfls_status sfls_generate(sfls_shape shape, int depth, double density,
                          uint64_t seed, sfls_cloud** out) {
  if (!out) return invalid("null argument");
  if (shape < SFLS_SHAPE_PLANE || shape > SFLS_SHAPE_CUBE_SHELL)
    return invalid("unknown shape");
  return guarded([&] {
    *out = new sfls_cloud{sfls::generate_cloud(
        static_cast<sfls::Shape>(shape), depth, density, seed)};
  });
}

const uint8_t* sfls_buffer_data(const sfls_buffer* buffer) {
  return buffer ? buffer->bytes.data() : nullptr;
}

size_t sfls_buffer_size(const sfls_buffer* buffer) {
  return buffer ? buffer->bytes.size() : 0;
}

void sfls_buffer_free(sfls_buffer* buffer) { delete buffer; }

void sfls_encoder_config_init(sfls_encoder_config* config) {
  if (!config) return;
  config->lambda = 1.0;
  config->levels = 3;
  config->floor_level = 1;
  config->rho = 1.0;
  config->fit_iters = 300;
  config->fit_step = 0.05;
  config->seed = 0;
  config->threads = 0;
}

sfls_status sfls_encode(const sfls_cloud* cloud,
                        const sfls_encoder_config* config, sfls_buffer** out,
                        sfls_encode_stats* stats) {
  if (!cloud || !config || !out) return invalid("null argument");
  return guarded([&] {
    sfls::EncodeResult result =
        sfls::encode(cloud->cloud, to_codec_config(*config));
    if (stats) {
      std::memset(stats, 0, sizeof(*stats));
      stats->total_bytes = result.stats.total_bytes;
      stats->bpp = result.stats.bpp;
      stats->flag_bits = result.stats.flag_bits;
      stats->octant_bits = result.stats.octant_bits;
      stats->surfel_bits = result.stats.surfel_bits;
      for (int l = 0; l < SFLS_MAX_LEVELS; ++l) {
        stats->surfels_per_level[l] = result.stats.levels[l].surfels;
        stats->splits_per_level[l] = result.stats.levels[l].splits;
      }
    }
    *out = new sfls_buffer{std::move(result.bytes)};
  });
}

sfls_status sfls_decode(const uint8_t* data, size_t size, sfls_cloud** out) {
  if (!data || !out) return invalid("null argument");
  return guarded([&] {
    sfls::DecodeResult result = sfls::decode({data, size});
    *out = new sfls_cloud{std::move(result.cloud)};
  });
}

sfls_status sfls_metric_d1(const sfls_cloud* ref, const sfls_cloud* rec,
                           double peak, double* out_db) {
  if (!ref || !rec || !out_db) return invalid("null argument");
  return guarded([&] {
    double p = peak > 0.0 ? peak : static_cast<double>((1 << ref->cloud.depth()) - 1);
    *out_db = sfls::d1_psnr(ref->cloud, rec->cloud, p);
  });
}

sfls_status sfls_metric_d2(const sfls_cloud* ref, const sfls_cloud* rec,
                           double peak, int k, double* out_db) {
  if (!ref || !rec || !out_db) return invalid("null argument");
  return guarded([&] {
    double p = peak > 0.0 ? peak : static_cast<double>((1 << ref->cloud.depth()) - 1);
    std::vector<sfls::Vec3> normals =
        sfls::estimate_normals(ref->cloud, k > 0 ? k : 9);
    *out_db = sfls::d2_psnr(ref->cloud, normals, rec->cloud, p);
  });
}

sfls_status sfls_bd_rate(const double* anchor_bpp, const double* anchor_db,
                         size_t anchor_n, const double* test_bpp,
                         const double* test_db, size_t test_n,
                         double* out_percent) {
  if (!anchor_bpp || !anchor_db || !test_bpp || !test_db || !out_percent)
    return invalid("null argument");
  return guarded([&] {
    sfls::RdCurve anchor, test;
    for (size_t i = 0; i < anchor_n; ++i)
      anchor.points.push_back({anchor_bpp[i], anchor_db[i], anchor_db[i]});
    for (size_t i = 0; i < test_n; ++i)
      test.points.push_back({test_bpp[i], test_db[i], test_db[i]});
    *out_percent = sfls::bd_rate(anchor, test, 0);
  });
}

}  // extern "C"
