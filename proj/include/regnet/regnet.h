// Copyright 2026 The RegNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REGNET_REGNET_H_
#define REGNET_REGNET_H_

/*
 * C interface to the regnet library.
 *
 * All objects are opaque handles created by a *_create / *_load / *_generate
 * function and released with the matching *_free function (which accepts
 * NULL). Every fallible function returns an rgn_status; on failure the
 * message is available from rgn_last_error() on the calling thread until the
 * next failing call. Output handles are left untouched on failure.
 *
 * Text results use the two-call pattern: pass buf = NULL to query the
 * required size (including the terminating NUL) through *needed.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(REGNET_BUILDING_SHARED)
#    define RGN_API __declspec(dllexport)
#  else
#    define RGN_API __declspec(dllimport)
#  endif
#else
#  define RGN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rgn_status {
  RGN_OK = 0,
  RGN_ERR_USAGE = 1,
  RGN_ERR_NUMERIC = 2,
  RGN_ERR_IO = 3
} rgn_status;

typedef enum rgn_variant {
  RGN_VARIANT_CLASSICAL = 0,
  RGN_VARIANT_NULLSPACE = 1,
  RGN_VARIANT_CONTINUED = 2
} rgn_variant;

typedef enum rgn_filter_kind {
  RGN_FILTER_TIKHONOV = 0,
  RGN_FILTER_TSVD = 1,
  RGN_FILTER_LANDWEBER = 2
} rgn_filter_kind;

typedef struct rgn_filter_spec {
  rgn_filter_kind kind;
  double landweber_step; /* only read for RGN_FILTER_LANDWEBER */
} rgn_filter_spec;

typedef struct rgn_geometry {
  size_t grid_side;
  size_t angles;
  size_t detectors;
  double detector_min;
  double detector_max;
  double kb_support;
  double kb_shape;
} rgn_geometry;

typedef struct rgn_train_options {
  double learning_rate;
  double momentum;
  size_t epochs;
  size_t batch_size;
  size_t width;         /* hidden channels */
  uint64_t init_seed;
  uint64_t shuffle_seed;
} rgn_train_options;

typedef enum rgn_text_kind {
  RGN_TEXT_ALPHA_CSV = 0, /* alpha,kept,mse,mae */
  RGN_TEXT_RATE_CSV = 1,  /* delta,alpha,error */
  RGN_TEXT_SUMMARY = 2    /* key=value lines */
} rgn_text_kind;

typedef struct rgn_operator rgn_operator;
typedef struct rgn_dataset rgn_dataset;
typedef struct rgn_network rgn_network;
typedef struct rgn_family rgn_family;
typedef struct rgn_method rgn_method;
typedef struct rgn_report rgn_report;

typedef void (*rgn_epoch_callback)(size_t epoch, double mean_loss, void* user);

RGN_API const char* rgn_last_error(void);
RGN_API const char* rgn_version(void);
RGN_API uint64_t rgn_hash64(const void* bytes, size_t size);

RGN_API rgn_status rgn_parse_variant(const char* name, rgn_variant* out);
RGN_API rgn_status rgn_parse_filter(const char* name, double landweber_step,
                                    rgn_filter_spec* out);

/* Geometry. paper_scale != 0 selects 128 x 128, 30 angles, 200 offsets. */
RGN_API void rgn_geometry_default(rgn_geometry* geometry, int paper_scale);

/* Operator: system matrix with its singular system. */
RGN_API rgn_status rgn_operator_assemble(const rgn_geometry* geometry, double rank_tol,
                                         rgn_operator** out);
RGN_API rgn_status rgn_operator_load(const char* path, double rank_tol, rgn_operator** out);
RGN_API rgn_status rgn_operator_save(const rgn_operator* op, const char* path,
                                     const char* metadata);
RGN_API void rgn_operator_free(rgn_operator* op);
RGN_API rgn_status rgn_operator_shape(const rgn_operator* op, size_t* rows, size_t* cols,
                                      size_t* rank);
RGN_API rgn_status rgn_operator_retained_count(const rgn_operator* op, double alpha,
                                               size_t* out);
RGN_API rgn_status rgn_operator_forward(const rgn_operator* op, const double* x, size_t x_size,
                                        double* y, size_t y_size);
/* (A^T A)^mu w for a seeded Gaussian w scaled to norm rho. */
RGN_API rgn_status rgn_operator_source_element(const rgn_operator* op, double mu, double rho,
                                               uint64_t seed, double* x, size_t x_size);

/* Datasets of phantom coefficient images (one image per row). */
RGN_API rgn_status rgn_dataset_generate(size_t grid_side, size_t count, uint64_t first_seed,
                                        rgn_dataset** out);
RGN_API rgn_status rgn_dataset_load(const char* path, rgn_dataset** out);
RGN_API rgn_status rgn_dataset_save(const rgn_dataset* dataset, const char* path,
                                    const char* metadata);
RGN_API void rgn_dataset_free(rgn_dataset* dataset);
RGN_API rgn_status rgn_dataset_shape(const rgn_dataset* dataset, size_t* count,
                                     size_t* pixels);
RGN_API rgn_status rgn_dataset_image(const rgn_dataset* dataset, size_t index, double* out,
                                     size_t size);

/* Networks. Training pairs are (B_alpha A c, c) for the dataset images c. */
RGN_API void rgn_train_options_default(rgn_train_options* options);
RGN_API rgn_status rgn_train(const rgn_operator* op, const rgn_dataset* dataset,
                             rgn_variant variant, const rgn_filter_spec* filter, double alpha,
                             const rgn_train_options* options, rgn_epoch_callback callback,
                             void* user, rgn_network** out);
RGN_API rgn_status rgn_network_load(const char* path, rgn_network** out);
RGN_API rgn_status rgn_network_save(const rgn_network* net, const char* path,
                                    const char* metadata);
RGN_API void rgn_network_free(rgn_network* net);
RGN_API rgn_status rgn_network_lipschitz(const rgn_network* net, double* out);

/* Families: "alpha=<decimal> model=<path>" manifests. Relative model paths
 * are resolved against the manifest's directory. */
RGN_API rgn_status rgn_manifest_write(const char* path, const double* alphas,
                                      const char* const* model_paths, size_t count,
                                      const char* comment);
RGN_API rgn_status rgn_family_load(const char* manifest_path, rgn_family** out);
RGN_API void rgn_family_free(rgn_family* family);
RGN_API size_t rgn_family_size(const rgn_family* family);
RGN_API double rgn_family_alpha(const rgn_family* family, size_t index);
/* Borrowed pointer, valid while the family lives. */
RGN_API const rgn_network* rgn_family_network(const rgn_family* family, size_t index);

/* Reconstruction methods. net must be NULL for RGN_VARIANT_CLASSICAL. The
 * method keeps its own references; op and net may be freed afterwards. */
RGN_API rgn_status rgn_method_create(const rgn_operator* op, rgn_variant variant,
                                     const rgn_filter_spec* filter, double alpha,
                                     const rgn_network* net, rgn_method** out);
RGN_API void rgn_method_free(rgn_method* method);
RGN_API double rgn_method_alpha(const rgn_method* method);
RGN_API rgn_status rgn_method_reconstruct(const rgn_method* method, const double* y,
                                          size_t y_size, double* x, size_t x_size);
/* Distance of x - N(B_alpha A x) to {(A^T A)^mu w : ||w|| <= rho}. */
RGN_API rgn_status rgn_method_distance(const rgn_method* method, const double* x, size_t x_size,
                                       double mu, double rho, double* out);

/* Experiments. */
/* Images [first, first + count) of the dataset with relative Gaussian noise
 * delta; item k uses seed + k. */
RGN_API rgn_status rgn_evaluate(const rgn_method* const* methods, size_t method_count,
                                const rgn_dataset* dataset, size_t first, size_t count,
                                double delta, uint64_t seed, rgn_report** out);
RGN_API rgn_status rgn_rates_classical(const rgn_operator* op, const rgn_filter_spec* filter,
                                       double mu, double rho, const double* deltas,
                                       size_t delta_count, double scale, uint64_t seed,
                                       rgn_report** out);
/* Filter axioms over descending alphas plus the qualification inequality
 * for the given smoothness orders. *passed is 1 when every check holds. */
RGN_API rgn_status rgn_check_filter(const rgn_filter_spec* filter, double lambda_max,
                                    const double* alphas, size_t alpha_count, const double* mus,
                                    size_t mu_count, int* passed, rgn_report** out);

RGN_API void rgn_report_free(rgn_report* report);
RGN_API rgn_status rgn_report_text(const rgn_report* report, rgn_text_kind kind,
                                   const char* comment, char* buf, size_t capacity,
                                   size_t* needed);
/* Fails with RGN_ERR_USAGE when the report has no such value. */
RGN_API rgn_status rgn_report_best_alpha(const rgn_report* report, double* out);
RGN_API rgn_status rgn_report_slope(const rgn_report* report, double* out);
RGN_API rgn_status rgn_report_alpha_row(const rgn_report* report, size_t index, double* alpha,
                                        size_t* kept, double* mse, double* mae);
RGN_API size_t rgn_report_alpha_rows(const rgn_report* report);

/* y + delta * max|y| * g with g seeded i.i.d. standard normal. */
RGN_API rgn_status rgn_add_noise(const double* y, size_t size, double delta, uint64_t seed,
                                 double* out);

/* Images: 16-bit binary PGM, values clamped to [0, 1]. With rescale != 0 the
 * image is first mapped affinely onto [0, 1]. */
RGN_API rgn_status rgn_write_pgm16(const char* path, const double* image, size_t side,
                                   int rescale, const char* comment);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* REGNET_REGNET_H_ */
