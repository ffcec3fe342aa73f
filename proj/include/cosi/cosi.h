/*
 * Copyright 2026 The cosi Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef COSI_COSI_H
#define COSI_COSI_H

#include <stddef.h>
#include <stdint.h>

#if defined(COSI_BUILDING_LIBRARY)
#define COSI_API __attribute__((visibility("default")))
#else
#define COSI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cosi_status {
  COSI_OK = 0,
  COSI_ERR_INVALID_ARGUMENT = 1, /* null pointer, zero size */
  COSI_ERR_DIMENSION = 2,
  COSI_ERR_DOMAIN = 3,           /* parameter out of range */
  COSI_ERR_NUMERICAL = 4,        /* singular or ill-conditioned */
  COSI_ERR_CONVERGENCE = 5,
  COSI_ERR_REFUSED = 6,
  COSI_ERR_SCENARIO = 7,         /* malformed scenario file */
  COSI_ERR_IO = 8,
  COSI_ERR_INTERNAL = 99
} cosi_status;

COSI_API const char* cosi_version(void);
COSI_API const char* cosi_status_string(cosi_status status);
/* Message of the last failed call on this thread; "" after a success. */
COSI_API const char* cosi_last_error(void);
/* Directory of the shipped fixture scenarios. */
COSI_API const char* cosi_fixture_dir(void);

/* Matrices are dense and row-major throughout. */

/* ---- normed spaces ---- */
typedef struct cosi_space cosi_space;

COSI_API cosi_status cosi_space_weighted_lp(const double* weights, size_t n, double p, cosi_space** out);
COSI_API cosi_status cosi_space_sum(const cosi_space* a, const cosi_space* b, cosi_space** out);
COSI_API cosi_status cosi_space_intersection(const cosi_space* a, const cosi_space* b, cosi_space** out);
COSI_API cosi_status cosi_space_dual(const cosi_space* a, const double* pairing, cosi_space** out);
COSI_API void cosi_space_free(cosi_space* space);
COSI_API size_t cosi_space_dim(const cosi_space* space);
COSI_API cosi_status cosi_space_norm(const cosi_space* space, const double* x, size_t n, double* out);
/* Norm of f in the dual of `space` under sum_i pairing_i f_i x_i. `upper`
 * and `certified` may be null. */
COSI_API cosi_status cosi_dual_norm(const cosi_space* space, const double* pairing, const double* f, size_t n,
                                    double* value, double* upper, int* certified);

/* ---- interpolation ---- */
COSI_API cosi_status cosi_k_functional(const cosi_space* x0, const cosi_space* x1, double t, const double* x,
                                       size_t n, double* value, int* certified);
/* q may be INFINITY. */
COSI_API cosi_status cosi_real_interp_norm(const cosi_space* x0, const cosi_space* x1, double theta, double q, int J,
                                           const double* x, size_t n, double* value, int* certified);

/* ---- matrices and semigroups ---- */
COSI_API cosi_status cosi_expm(const double* a, size_t n, double* out);
COSI_API cosi_status cosi_semigroup_apply(const double* a, size_t n, double t, const double* x, double* out);
COSI_API cosi_status cosi_resolvent_apply(const double* a, size_t n, double lambda, const double* x, double* out);
COSI_API cosi_status cosi_euler_apply(const double* a, size_t n, double t, int steps, const double* x, double* out);
/* Norm of T: l^p -> l^p (unit weights); exact for p in {1, 2, inf}. */
COSI_API cosi_status cosi_lp_operator_norm(const double* t, size_t rows, size_t cols, double p, double* lower,
                                           double* upper);

/* ---- scenarios ---- */
typedef struct cosi_scenario cosi_scenario;
typedef struct cosi_run cosi_run;

typedef struct cosi_run_options {
  unsigned jobs;   /* 0: hardware concurrency */
  int has_seed;    /* non-zero: override the scenario seed */
  uint64_t seed;
} cosi_run_options;

COSI_API cosi_status cosi_scenario_load(const char* path, cosi_scenario** out);
COSI_API cosi_status cosi_scenario_parse(const char* text, cosi_scenario** out);
COSI_API void cosi_scenario_free(cosi_scenario* scenario);
COSI_API const char* cosi_scenario_name(const cosi_scenario* scenario);
COSI_API const char* cosi_scenario_digest(const cosi_scenario* scenario);
COSI_API uint64_t cosi_scenario_seed(const cosi_scenario* scenario);
COSI_API size_t cosi_scenario_check_count(const cosi_scenario* scenario);
COSI_API size_t cosi_scenario_ladder_levels(const cosi_scenario* scenario);

/* options may be null. */
COSI_API cosi_status cosi_run_scenario(const cosi_scenario* scenario, const cosi_run_options* options, cosi_run** out);
COSI_API void cosi_run_free(cosi_run* run);
/* 0 all passed, 1 any failed, 2 any inconclusive and none failed. */
COSI_API int cosi_run_exit_code(const cosi_run* run);
COSI_API size_t cosi_run_check_count(const cosi_run* run);
/* Strings stay valid until cosi_run_free; an out-of-range index gives "". */
COSI_API const char* cosi_run_check_name(const cosi_run* run, size_t index);
COSI_API const char* cosi_run_check_verdict(const cosi_run* run, size_t index);
COSI_API const char* cosi_run_table(const cosi_run* run);
COSI_API const char* cosi_run_tree(const cosi_run* run);
COSI_API cosi_status cosi_run_emit(const cosi_run* run, const char* dir, int tree, int table);

#ifdef __cplusplus
}
#endif

#endif /* COSI_COSI_H */
