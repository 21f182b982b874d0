/* Copyright (c) 2026 the surfelsoup authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the surfelsoup point-cloud geometry codec. All functions
 * return SFLS_OK on success; on failure they return an error code and leave
 * a message retrievable with sfls_last_error() (thread-local). Objects are
 * opaque handles owned by the caller and released with the matching _free.
 */

#ifndef SURFELSOUP_H
#define SURFELSOUP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SFLS_API __declspec(dllexport)
#else
#define SFLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfls_status {
  SFLS_OK = 0,
  SFLS_ERR_INVALID_ARGUMENT = 1,
  SFLS_ERR_RANGE = 2,
  SFLS_ERR_EMPTY_INPUT = 3,
  SFLS_ERR_PARSE = 4,
  SFLS_ERR_IO = 5,
  SFLS_ERR_TRUNCATED_STREAM = 6,
  SFLS_ERR_CORRUPT_STREAM = 7,
  SFLS_ERR_INTERNAL = 8
} sfls_status;

SFLS_API const char* sfls_status_name(sfls_status status);

/* Message of the most recent failing call on this thread. */
SFLS_API const char* sfls_last_error(void);

/* ---- point clouds ---- */

typedef struct sfls_cloud sfls_cloud;

/* depth < 0: use the PLY "comment depth" line if present, else infer. */
SFLS_API sfls_status sfls_cloud_load_ply(const char* path, int depth,
                                         sfls_cloud** out);
SFLS_API sfls_status sfls_cloud_save_ply(const sfls_cloud* cloud,
                                         const char* path);
SFLS_API sfls_status sfls_cloud_create(const uint32_t* xyz, size_t count,
                                       int depth, sfls_cloud** out);
SFLS_API size_t sfls_cloud_size(const sfls_cloud* cloud);
SFLS_API int sfls_cloud_depth(const sfls_cloud* cloud);
/* xyz_out must hold 3 * sfls_cloud_size(cloud) values. */
SFLS_API sfls_status sfls_cloud_points(const sfls_cloud* cloud,
                                       uint32_t* xyz_out);
SFLS_API void sfls_cloud_free(sfls_cloud* cloud);

/* ---- synthetic content ---- */

typedef enum sfls_shape {
  SFLS_SHAPE_PLANE = 0,
  SFLS_SHAPE_SPHERE = 1,
  SFLS_SHAPE_CUBE_SHELL = 2
} sfls_shape;

SFLS_API sfls_status sfls_generate(sfls_shape shape, int depth, double density,
                                   uint64_t seed, sfls_cloud** out);

/* ---- codec ---- */

typedef struct sfls_buffer sfls_buffer;

SFLS_API const uint8_t* sfls_buffer_data(const sfls_buffer* buffer);
SFLS_API size_t sfls_buffer_size(const sfls_buffer* buffer);
SFLS_API void sfls_buffer_free(sfls_buffer* buffer);

typedef struct sfls_encoder_config {
  double lambda;      /* rate-distortion weight, >= 0 */
  int levels;         /* highest decision level L */
  int floor_level;    /* forced-surfel level */
  double rho;         /* binarization scale */
  int fit_iters;      /* surfel fit iterations */
  double fit_step;    /* surfel fit step size */
  uint64_t seed;
  int threads;        /* 0 = auto; SURFELSOUP_THREADS always caps */
} sfls_encoder_config;

SFLS_API void sfls_encoder_config_init(sfls_encoder_config* config);

#define SFLS_MAX_LEVELS 17

typedef struct sfls_encode_stats {
  uint64_t total_bytes;
  double bpp;
  double flag_bits;   /* estimated decomposition of the coded body */
  double octant_bits;
  double surfel_bits;
  uint32_t surfels_per_level[SFLS_MAX_LEVELS];
  uint32_t splits_per_level[SFLS_MAX_LEVELS];
} sfls_encode_stats;

SFLS_API sfls_status sfls_encode(const sfls_cloud* cloud,
                                 const sfls_encoder_config* config,
                                 sfls_buffer** out,
                                 sfls_encode_stats* stats /* nullable */);
SFLS_API sfls_status sfls_decode(const uint8_t* data, size_t size,
                                 sfls_cloud** out);

/* ---- quality metrics ---- */

/* peak <= 0 selects 2^depth - 1 of the reference cloud. */
SFLS_API sfls_status sfls_metric_d1(const sfls_cloud* ref,
                                    const sfls_cloud* rec, double peak,
                                    double* out_db);
/* k: neighborhood size for reference normals (<= 0 selects the default 9). */
SFLS_API sfls_status sfls_metric_d2(const sfls_cloud* ref,
                                    const sfls_cloud* rec, double peak, int k,
                                    double* out_db);

/* Curves as parallel arrays ordered by ascending bpp; >= 4 points each. */
SFLS_API sfls_status sfls_bd_rate(const double* anchor_bpp,
                                  const double* anchor_db, size_t anchor_n,
                                  const double* test_bpp,
                                  const double* test_db, size_t test_n,
                                  double* out_percent);

#ifdef __cplusplus
}
#endif

#endif /* SURFELSOUP_H */
