// Copyright 2026 The CCMA Kinematics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface of the CCMA kinematics library. All handles are opaque; every
 * fallible call returns a ccma_status and leaves a message retrievable with
 * ccma_last_error() on the calling thread. Arrays are caller-owned and sized
 * by the accompanying count argument; matrices are row-major. */

#ifndef CCMA_CCMA_H_
#define CCMA_CCMA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CCMA_BUILDING_LIBRARY)
#define CCMA_API __declspec(dllexport)
#else
#define CCMA_API __declspec(dllimport)
#endif
#else
#define CCMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ccma_status {
  CCMA_OK = 0,
  CCMA_ERR_INVALID_ARGUMENT = 1,
  CCMA_ERR_PARSE = 2,
  CCMA_ERR_DANGLING_BODY_REF = 3,
  CCMA_ERR_DUPLICATE_BASE = 4,
  CCMA_ERR_NON_UNIT_AXIS = 5,
  CCMA_ERR_INVALID_SCENE = 6,
  CCMA_ERR_UNKNOWN_CANONICAL = 7,
  CCMA_ERR_INFEASIBLE_SCENE = 8,
  CCMA_ERR_DIMENSION_MISMATCH = 9,
  CCMA_ERR_NON_CONVERGENCE = 10,
  CCMA_ERR_SOLVER_BREAKDOWN = 11,
  CCMA_ERR_SINGULAR_SENSITIVITY = 12,
  CCMA_ERR_MAX_ITERS = 13,
  CCMA_ERR_IO = 14,
  CCMA_ERR_VALIDATION_FAILED = 15,
  CCMA_ERR_INTERNAL = 16
} ccma_status;

typedef enum ccma_hessian_mode {
  CCMA_HESSIAN_FULL = 0,
  CCMA_HESSIAN_GAUSS_NEWTON = 1
} ccma_hessian_mode;

typedef enum ccma_bfgs_init {
  CCMA_BFGS_SCALED_IDENTITY = 0,
  CCMA_BFGS_TASK_GAUSS_NEWTON = 1
} ccma_bfgs_init;

typedef enum ccma_ik_status {
  CCMA_IK_CONVERGED = 0,
  CCMA_IK_MAX_ITERS = 1,
  CCMA_IK_LINE_SEARCH_FAILURE = 2,
  CCMA_IK_SINGULAR_SENSITIVITY = 3,
  CCMA_IK_FORWARD_FAILURE = 4
} ccma_ik_status;

typedef struct ccma_scene ccma_scene;
typedef struct ccma_track ccma_track;
typedef struct ccma_bench ccma_bench;

CCMA_API const char* ccma_version(void);
CCMA_API const char* ccma_status_name(ccma_status status);
/* Message of the last failed call on this thread ("" if none). */
CCMA_API const char* ccma_last_error(void);

/* ---- scenes ---- */

CCMA_API size_t ccma_canonical_count(void);
CCMA_API const char* ccma_canonical_name(size_t index);

CCMA_API ccma_status ccma_scene_canonical(const char* name, ccma_scene** out);
CCMA_API ccma_status ccma_scene_load_file(const char* path, ccma_scene** out);
CCMA_API ccma_status ccma_scene_load_string(const char* text,
                                            ccma_scene** out);
/* Canonical name if it is one, otherwise a scene file path. */
CCMA_API ccma_status ccma_scene_resolve(const char* name_or_path,
                                        ccma_scene** out);
CCMA_API void ccma_scene_free(ccma_scene* scene);

typedef struct ccma_scene_info {
  int num_bodies;
  int num_bases;
  int num_states;
  int num_controls;
  int num_free_controls;
  int num_rows;
  int num_blocks;
  int ee_body;
  int task_mask[6]; /* x, y, z, yaw, pitch, roll */
} ccma_scene_info;

CCMA_API ccma_status ccma_scene_get_info(const ccma_scene* scene,
                                         ccma_scene_info* out);
/* Returned strings live as long as the scene. */
CCMA_API const char* ccma_scene_name(const ccma_scene* scene);
CCMA_API const char* ccma_scene_description(const ccma_scene* scene);
CCMA_API const char* ccma_scene_body_name(const ccma_scene* scene, int body);
/* 1 when base k uses the reduced actuation scheme (frozen heading). */
CCMA_API int ccma_scene_base_reduced(const ccma_scene* scene, int base);
CCMA_API ccma_status ccma_scene_free_controls(const ccma_scene* scene,
                                              int* indices, size_t capacity,
                                              size_t* count);
/* Writes the JSON text into buf when it fits; *needed always receives the
 * size including the terminating zero. */
CCMA_API ccma_status ccma_scene_serialize(const ccma_scene* scene, char* buf,
                                          size_t capacity, size_t* needed);
/* Assembled reference pose and the load-time controls. */
CCMA_API ccma_status ccma_scene_assemble(const ccma_scene* scene, double* s0,
                                         size_t n_s, double* u0, size_t n_u);

/* ---- forward kinematics ---- */

typedef struct ccma_fk_config {
  double grad_tol;
  int max_iters;
  double damping;
  double max_damping;
  ccma_hessian_mode hessian_mode;
} ccma_fk_config;

typedef struct ccma_fk_result {
  double energy;
  double grad_norm;
  double wall_time;
  int iters;
  int converged;
} ccma_fk_result;

CCMA_API void ccma_fk_config_default(ccma_fk_config* cfg);

CCMA_API ccma_status ccma_energy(const ccma_scene* scene, const double* s,
                                 size_t n_s, const double* u, size_t n_u,
                                 double* energy);
/* x, y, z, yaw, pitch, roll of the end-effector body. */
CCMA_API ccma_status ccma_ee_pose(const ccma_scene* scene, const double* s,
                                  size_t n_s, double pose[6]);
/* Returns CCMA_ERR_NON_CONVERGENCE or CCMA_ERR_SOLVER_BREAKDOWN when the
 * solve fails; s_out and result are filled either way. cfg may be NULL. */
CCMA_API ccma_status ccma_solve_fk(const ccma_scene* scene,
                                   const ccma_fk_config* cfg,
                                   const double* s_init, size_t n_s,
                                   const double* u, size_t n_u, double* s_out,
                                   ccma_fk_result* result);
/* ds/du as an n_s x n_u row-major matrix. */
CCMA_API ccma_status ccma_state_sensitivity(const ccma_scene* scene,
                                            const ccma_fk_config* cfg,
                                            const double* s_hat, size_t n_s,
                                            const double* u, size_t n_u,
                                            double* out);
CCMA_API ccma_status ccma_write_state_csv(const ccma_scene* scene,
                                          const double* s, size_t n_s,
                                          const char* path);

/* ---- inverse kinematics and tracking ---- */

typedef struct ccma_ik_config {
  double lambda;
  double grad_tol;
  int max_outer_iters;
  double max_control_step;
  double max_residual_energy;
  ccma_bfgs_init bfgs_init;
  double trans_step;
  double rot_step;
  int direct; /* track whole waypoints without subdivision */
  ccma_fk_config fk;
} ccma_ik_config;

typedef struct ccma_ik_result {
  double objective;
  double grad_norm;
  double energy;
  double task_error;
  double wall_time;
  int iters;
  int fk_solves;
  int bfgs_resets;
  ccma_ik_status status;
} ccma_ik_result;

CCMA_API void ccma_ik_config_default(ccma_ik_config* cfg);

/* One IK solve from a feasible (s, u) toward target. Outputs are filled even
 * when the status is not CCMA_OK (CCMA_ERR_MAX_ITERS, ...). */
CCMA_API ccma_status ccma_solve_ik(const ccma_scene* scene,
                                   const ccma_ik_config* cfg, const double* s,
                                   size_t n_s, const double* u, size_t n_u,
                                   const double target[6], double* s_out,
                                   double* u_out, ccma_ik_result* result);

/* Reads a waypoint file into poses (rows of 6). *count receives the number of
 * waypoints; poses may be NULL to query it. *relative (may be NULL) is set
 * when the poses are offsets from the reference end-effector pose. */
CCMA_API ccma_status ccma_waypoints_load_file(const char* path, double* poses,
                                              size_t capacity_rows,
                                              size_t* count, int* relative);

/* Tracks targets (rows of 6) from the assembled reference pose. */
CCMA_API ccma_status ccma_track_run(const ccma_scene* scene,
                                    const ccma_ik_config* cfg,
                                    const double* targets, size_t n_targets,
                                    ccma_track** out);
/* Reads a track CSV written by ccma_track_write_csv for this scene. */
CCMA_API ccma_status ccma_track_read_csv(const ccma_scene* scene,
                                         const char* path, ccma_track** out);
CCMA_API void ccma_track_free(ccma_track* track);

typedef struct ccma_track_step_info {
  int waypoint;
  int substep;
  ccma_ik_status status;
  int iters;
  int fk_solves;
  double wall_time;
  double objective;
  double energy;
  double task_error;
  double commanded[6];
  double achieved[6];
} ccma_track_step_info;

CCMA_API size_t ccma_track_step_count(const ccma_track* track);
CCMA_API ccma_status ccma_track_step(const ccma_track* track, size_t index,
                                     ccma_track_step_info* out);
CCMA_API ccma_status ccma_track_step_controls(const ccma_track* track,
                                              size_t index, double* u,
                                              size_t n_u);
CCMA_API int ccma_track_failures(const ccma_track* track);
CCMA_API double ccma_track_wall_time(const ccma_track* track);
CCMA_API ccma_status ccma_track_rmse(const ccma_track* track,
                                     double rmse[6]);
CCMA_API ccma_status ccma_track_write_csv(const ccma_track* track,
                                          const char* path);

/* ---- open-loop execution on simulated omni-wheel bases ---- */

typedef struct ccma_exec_config {
  double wheel_radius;
  double mount_radius;
  double mount_angles[3];
  double kp[3];
  double ki[3];
  double integrator_clamp;
  double dt;
  double hold;
  double noise_sigma;
  uint64_t seed;
} ccma_exec_config;

typedef struct ccma_exec_result {
  double ee_rmse;
  double ee_rmse_yaw;
  int fk_failures;
  size_t samples;
} ccma_exec_result;

CCMA_API void ccma_exec_config_default(ccma_exec_config* cfg);
/* Either CSV path may be NULL. */
CCMA_API ccma_status ccma_execute(const ccma_track* track,
                                  const ccma_exec_config* cfg,
                                  const char* base_csv, const char* ee_csv,
                                  ccma_exec_result* result);

/* ---- derivative validation ---- */

#define CCMA_NUM_LAYERS 6

typedef struct ccma_validate_config {
  int local_trials;
  int pipeline_trials;
  double h_local;
  double h_pipeline;
  double tol_local;
  double tol_pipeline;
  uint64_t seed;
  int corrupt_layer; /* -1 for none */
} ccma_validate_config;

typedef struct ccma_layer_result {
  int layer;
  double max_rel_error;
  double tolerance;
  int trials;
  int worst_trial;
  int passed;
  char worst_entry[160];
} ccma_layer_result;

typedef struct ccma_validate_result {
  int passed;
  double wall_time;
  ccma_layer_result layers[CCMA_NUM_LAYERS];
} ccma_validate_result;

CCMA_API void ccma_validate_config_default(ccma_validate_config* cfg);
CCMA_API const char* ccma_layer_name(int layer);
/* -1 for an unknown name. */
CCMA_API int ccma_layer_from_name(const char* name);
/* CCMA_ERR_VALIDATION_FAILED when any layer misses its tolerance; result is
 * filled either way. csv_path may be NULL. */
CCMA_API ccma_status ccma_validate_gradients(const ccma_scene* scene,
                                             const ccma_validate_config* cfg,
                                             const char* csv_path,
                                             ccma_validate_result* result);

/* ---- convergence benchmark ---- */

typedef struct ccma_bench_config {
  int reps;
  double translation;
  double rotation;
  uint64_t seed;
  ccma_ik_config ik;
} ccma_bench_config;

typedef struct ccma_bench_summary {
  char scene[96];
  int bodies;
  int bases;
  int free_controls;
  int reps;
  int converged;
  double mean_time;
  double median_time;
  double min_time;
  double max_time;
  double mean_iters;
} ccma_bench_summary;

CCMA_API void ccma_bench_config_default(ccma_bench_config* cfg);
CCMA_API ccma_status ccma_bench_run(const ccma_scene* const* scenes,
                                    size_t n_scenes,
                                    const ccma_bench_config* cfg,
                                    ccma_bench** out);
CCMA_API void ccma_bench_free(ccma_bench* bench);
CCMA_API size_t ccma_bench_count(const ccma_bench* bench);
CCMA_API ccma_status ccma_bench_summary_get(const ccma_bench* bench,
                                            size_t index,
                                            ccma_bench_summary* out);
/* Summary table and per-repetition table; runs_csv may be NULL. */
CCMA_API ccma_status ccma_bench_write_csv(const ccma_bench* bench,
                                          const char* summary_csv,
                                          const char* runs_csv);

#ifdef __cplusplus
}
#endif

#endif /* CCMA_CCMA_H_ */
