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


#include "ccma/ccma.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "base_sim.hpp"
#include "bench.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "forward_solver.hpp"
#include "ik_control.hpp"
#include "validation.hpp"

#ifndef CCMA_VERSION_STRING
#define CCMA_VERSION_STRING "0.0.0"
#endif

struct ccma_scene {
  ccma::SceneModel model;
};

struct ccma_track {
  std::shared_ptr<const ccma::SceneModel> model;
  ccma::Vector s0;
  ccma::Vector u0;
  ccma::TrackReport report;
};

struct ccma_bench {
  std::vector<ccma::BenchSummary> summaries;
};

namespace {

thread_local std::string g_last_error;

class StatusError : public std::exception {
 public:
  StatusError(ccma_status status, std::string message)
      : status_(status), message_(std::move(message)) {}
  ccma_status status() const { return status_; }
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  ccma_status status_;
  std::string message_;
};

ccma_status map_code(ccma::ErrorCode code) {
  using ccma::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return CCMA_ERR_INVALID_ARGUMENT;
    case ErrorCode::kParseError: return CCMA_ERR_PARSE;
    case ErrorCode::kDanglingBodyRef: return CCMA_ERR_DANGLING_BODY_REF;
    case ErrorCode::kDuplicateBase: return CCMA_ERR_DUPLICATE_BASE;
    case ErrorCode::kNonUnitAxis: return CCMA_ERR_NON_UNIT_AXIS;
    case ErrorCode::kInvalidScene: return CCMA_ERR_INVALID_SCENE;
    case ErrorCode::kUnknownScene: return CCMA_ERR_UNKNOWN_CANONICAL;
    case ErrorCode::kInfeasibleScene: return CCMA_ERR_INFEASIBLE_SCENE;
    case ErrorCode::kDimensionMismatch: return CCMA_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kSingularSensitivity: return CCMA_ERR_SINGULAR_SENSITIVITY;
    case ErrorCode::kIoError: return CCMA_ERR_IO;
  }
  return CCMA_ERR_INTERNAL;
}

template <typename F>
ccma_status guard(F&& body) {
  try {
    const ccma_status st = body();
    if (st == CCMA_OK) g_last_error.clear();
    return st;
  } catch (const StatusError& e) {
    g_last_error = e.what();
    return e.status();
  } catch (const ccma::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CCMA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CCMA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return CCMA_ERR_INTERNAL;
  }
}

ccma_status fail(ccma_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

void require(bool ok, const char* message) {
  if (!ok) throw StatusError(CCMA_ERR_INVALID_ARGUMENT, message);
}

ccma::Vector to_vector(const double* data, size_t n, int expected,
                       const char* what) {
  require(data != nullptr, "null array argument");
  if (static_cast<int>(n) != expected) {
    throw StatusError(CCMA_ERR_DIMENSION_MISMATCH,
                      std::string(what) + " has " + std::to_string(n) +
                          " entries, expected " + std::to_string(expected));
  }
  return Eigen::Map<const ccma::Vector>(data, static_cast<Eigen::Index>(n));
}

void copy_out(const ccma::Vector& v, double* out) {
  std::copy(v.data(), v.data() + v.size(), out);
}

ccma::FkConfig fk_from(const ccma_fk_config* c) {
  ccma::FkConfig out;
  if (c == nullptr) return out;
  out.grad_tol = c->grad_tol;
  out.max_iters = c->max_iters;
  out.damping = c->damping;
  out.max_damping = c->max_damping;
  require(c->hessian_mode == CCMA_HESSIAN_FULL ||
              c->hessian_mode == CCMA_HESSIAN_GAUSS_NEWTON,
          "unknown hessian mode");
  out.hessian_mode = c->hessian_mode == CCMA_HESSIAN_FULL
                         ? ccma::HessianMode::kFull
                         : ccma::HessianMode::kGaussNewton;
  out.validate();
  return out;
}

ccma::IkConfig ik_from(const ccma_ik_config* c) {
  ccma::IkConfig out;
  if (c == nullptr) return out;
  out.lambda = c->lambda;
  out.grad_tol = c->grad_tol;
  out.max_outer_iters = c->max_outer_iters;
  out.max_control_step = c->max_control_step;
  out.max_residual_energy = c->max_residual_energy;
  require(c->bfgs_init == CCMA_BFGS_SCALED_IDENTITY ||
              c->bfgs_init == CCMA_BFGS_TASK_GAUSS_NEWTON,
          "unknown quasi-Newton initialization");
  out.bfgs_init = c->bfgs_init == CCMA_BFGS_SCALED_IDENTITY
                      ? ccma::BfgsInit::kScaledIdentity
                      : ccma::BfgsInit::kTaskGaussNewton;
  out.trans_step = c->trans_step;
  out.rot_step = c->rot_step;
  out.direct = c->direct != 0;
  out.fk = fk_from(&c->fk);
  out.validate();
  return out;
}

ccma_ik_status ik_status_from(ccma::IkStatus s) {
  return static_cast<ccma_ik_status>(static_cast<int>(s));
}

ccma_status status_of(ccma::IkStatus s) {
  switch (s) {
    case ccma::IkStatus::kConverged: return CCMA_OK;
    case ccma::IkStatus::kMaxIters: return CCMA_ERR_MAX_ITERS;
    case ccma::IkStatus::kLineSearchFailure: return CCMA_ERR_NON_CONVERGENCE;
    case ccma::IkStatus::kSingularSensitivity:
      return CCMA_ERR_SINGULAR_SENSITIVITY;
    case ccma::IkStatus::kForwardFailure: return CCMA_ERR_NON_CONVERGENCE;
  }
  return CCMA_ERR_INTERNAL;
}

template <size_t N>
void copy_string(char (&dst)[N], const std::string& src) {
  const size_t n = std::min(N - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

ccma_status load_into(ccma_scene** out, ccma::SceneModel (*loader)(const std::string&),
                      const char* arg) {
  return guard([&] {
    require(out != nullptr && arg != nullptr, "null argument");
    *out = nullptr;
    auto scene = std::make_unique<ccma_scene>();
    scene->model = loader(arg);
    *out = scene.release();
    return CCMA_OK;
  });
}

}  // namespace

extern "C" {

const char* ccma_version(void) { return CCMA_VERSION_STRING; }

const char* ccma_status_name(ccma_status status) {
  switch (status) {
    case CCMA_OK: return "ok";
    case CCMA_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CCMA_ERR_PARSE: return "parse_error";
    case CCMA_ERR_DANGLING_BODY_REF: return "dangling_body_ref";
    case CCMA_ERR_DUPLICATE_BASE: return "duplicate_base";
    case CCMA_ERR_NON_UNIT_AXIS: return "non_unit_axis";
    case CCMA_ERR_INVALID_SCENE: return "invalid_scene";
    case CCMA_ERR_UNKNOWN_CANONICAL: return "unknown_canonical";
    case CCMA_ERR_INFEASIBLE_SCENE: return "infeasible_scene";
    case CCMA_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case CCMA_ERR_NON_CONVERGENCE: return "non_convergence";
    case CCMA_ERR_SOLVER_BREAKDOWN: return "solver_breakdown";
    case CCMA_ERR_SINGULAR_SENSITIVITY: return "singular_sensitivity";
    case CCMA_ERR_MAX_ITERS: return "max_iters";
    case CCMA_ERR_IO: return "io_error";
    case CCMA_ERR_VALIDATION_FAILED: return "validation_failed";
    case CCMA_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_status";
}

const char* ccma_last_error(void) { return g_last_error.c_str(); }

size_t ccma_canonical_count(void) { return ccma::canonical_names().size(); }

const char* ccma_canonical_name(size_t index) {
  const auto& names = ccma::canonical_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

ccma_status ccma_scene_canonical(const char* name, ccma_scene** out) {
  return load_into(out, [](const std::string& n) {
    return ccma::build_canonical(n);
  }, name);
}

ccma_status ccma_scene_load_file(const char* path, ccma_scene** out) {
  return load_into(out, [](const std::string& p) {
    return ccma::load_scene_file(p);
  }, path);
}

ccma_status ccma_scene_load_string(const char* text, ccma_scene** out) {
  return load_into(out, [](const std::string& t) {
    return ccma::load_scene(t);
  }, text);
}

ccma_status ccma_scene_resolve(const char* name_or_path, ccma_scene** out) {
  return load_into(out, [](const std::string& s) {
    return ccma::resolve_scene(s);
  }, name_or_path);
}

void ccma_scene_free(ccma_scene* scene) { delete scene; }

ccma_status ccma_scene_get_info(const ccma_scene* scene, ccma_scene_info* out) {
  return guard([&] {
    require(scene != nullptr && out != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    out->num_bodies = m.num_bodies();
    out->num_bases = m.num_bases();
    out->num_states = m.num_states();
    out->num_controls = m.num_controls();
    out->num_free_controls = m.num_free_controls();
    out->num_rows = m.num_rows;
    out->num_blocks = static_cast<int>(m.blocks.size());
    out->ee_body = m.end_effector.body;
    for (int c = 0; c < 6; ++c) out->task_mask[c] = m.end_effector.mask[c];
    return CCMA_OK;
  });
}

const char* ccma_scene_name(const ccma_scene* scene) {
  return scene ? scene->model.name.c_str() : nullptr;
}

const char* ccma_scene_description(const ccma_scene* scene) {
  return scene ? scene->model.description.c_str() : nullptr;
}

const char* ccma_scene_body_name(const ccma_scene* scene, int body) {
  if (!scene || body < 0 || body >= scene->model.num_bodies()) return nullptr;
  return scene->model.bodies[body].name.c_str();
}

int ccma_scene_base_reduced(const ccma_scene* scene, int base) {
  if (!scene || base < 0 || base >= scene->model.num_bases()) return 0;
  return scene->model.bases[base].scheme == ccma::ActuationScheme::kReduced;
}

ccma_status ccma_scene_free_controls(const ccma_scene* scene, int* indices,
                                     size_t capacity, size_t* count) {
  return guard([&] {
    require(scene != nullptr && count != nullptr, "null argument");
    const std::vector<int> free = scene->model.free_controls();
    *count = free.size();
    if (indices != nullptr) {
      require(capacity >= free.size(), "index buffer too small");
      std::copy(free.begin(), free.end(), indices);
    }
    return CCMA_OK;
  });
}

ccma_status ccma_scene_serialize(const ccma_scene* scene, char* buf,
                                 size_t capacity, size_t* needed) {
  return guard([&] {
    require(scene != nullptr && needed != nullptr, "null argument");
    const std::string text = ccma::serialize_scene(scene->model);
    *needed = text.size() + 1;
    if (buf != nullptr) {
      require(capacity >= text.size() + 1, "buffer too small");
      std::memcpy(buf, text.c_str(), text.size() + 1);
    }
    return CCMA_OK;
  });
}

ccma_status ccma_scene_assemble(const ccma_scene* scene, double* s0, size_t n_s,
                                double* u0, size_t n_u) {
  return guard([&] {
    require(scene != nullptr && s0 != nullptr && u0 != nullptr,
            "null argument");
    const ccma::SceneModel& m = scene->model;
    if (static_cast<int>(n_s) != m.num_states() ||
        static_cast<int>(n_u) != m.num_controls()) {
      throw StatusError(CCMA_ERR_DIMENSION_MISMATCH,
                        "buffer sizes do not match the scene");
    }
    const ccma::Assembly a = ccma::initial_assembly(m);
    copy_out(a.s0, s0);
    copy_out(a.u0, u0);
    return CCMA_OK;
  });
}

void ccma_fk_config_default(ccma_fk_config* cfg) {
  if (!cfg) return;
  const ccma::FkConfig d;
  cfg->grad_tol = d.grad_tol;
  cfg->max_iters = d.max_iters;
  cfg->damping = d.damping;
  cfg->max_damping = d.max_damping;
  cfg->hessian_mode = CCMA_HESSIAN_FULL;
}

ccma_status ccma_energy(const ccma_scene* scene, const double* s, size_t n_s,
                        const double* u, size_t n_u, double* energy) {
  return guard([&] {
    require(scene != nullptr && energy != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    *energy = ccma::energy(m, to_vector(s, n_s, m.num_states(), "s"),
                           to_vector(u, n_u, m.num_controls(), "u"));
    return CCMA_OK;
  });
}

ccma_status ccma_ee_pose(const ccma_scene* scene, const double* s, size_t n_s,
                         double pose[6]) {
  return guard([&] {
    require(scene != nullptr && pose != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    const ccma::Vector6 x =
        ccma::ee_state(m, to_vector(s, n_s, m.num_states(), "s"));
    std::copy(x.data(), x.data() + 6, pose);
    return CCMA_OK;
  });
}

ccma_status ccma_solve_fk(const ccma_scene* scene, const ccma_fk_config* cfg,
                          const double* s_init, size_t n_s, const double* u,
                          size_t n_u, double* s_out, ccma_fk_result* result) {
  return guard([&] {
    require(scene != nullptr && s_out != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    const ccma::SolveReport r = ccma::solve_fk(
        m, to_vector(s_init, n_s, m.num_states(), "s_init"),
        to_vector(u, n_u, m.num_controls(), "u"), fk_from(cfg));
    copy_out(r.s_hat, s_out);
    if (result) {
      result->energy = r.energy;
      result->grad_norm = r.grad_norm;
      result->wall_time = r.wall_time;
      result->iters = r.iters;
      result->converged = r.converged;
    }
    switch (r.status) {
      case ccma::SolveStatus::kConverged: return CCMA_OK;
      case ccma::SolveStatus::kNonConvergence:
        return fail(CCMA_ERR_NON_CONVERGENCE,
                    "forward solve did not converge (E = " +
                        std::to_string(r.energy) + ")");
      case ccma::SolveStatus::kSolverBreakdown:
        return fail(CCMA_ERR_SOLVER_BREAKDOWN,
                    "forward solve broke down: damping limit reached");
    }
    return CCMA_ERR_INTERNAL;
  });
}

ccma_status ccma_state_sensitivity(const ccma_scene* scene,
                                   const ccma_fk_config* cfg,
                                   const double* s_hat, size_t n_s,
                                   const double* u, size_t n_u, double* out) {
  return guard([&] {
    require(scene != nullptr && out != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    const ccma::Matrix d = ccma::state_sensitivity(
        m, to_vector(s_hat, n_s, m.num_states(), "s_hat"),
        to_vector(u, n_u, m.num_controls(), "u"), fk_from(cfg));
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>(out, d.rows(), d.cols()) = d;
    return CCMA_OK;
  });
}

ccma_status ccma_write_state_csv(const ccma_scene* scene, const double* s,
                                 size_t n_s, const char* path) {
  return guard([&] {
    require(scene != nullptr && path != nullptr, "null argument");
    const ccma::SceneModel& m = scene->model;
    ccma::write_csv(path, ccma::state_table(
                              m, to_vector(s, n_s, m.num_states(), "s")));
    return CCMA_OK;
  });
}

void ccma_ik_config_default(ccma_ik_config* cfg) {
  if (!cfg) return;
  const ccma::IkConfig d;
  cfg->lambda = d.lambda;
  cfg->grad_tol = d.grad_tol;
  cfg->max_outer_iters = d.max_outer_iters;
  cfg->max_control_step = d.max_control_step;
  cfg->max_residual_energy = d.max_residual_energy;
  cfg->bfgs_init = CCMA_BFGS_TASK_GAUSS_NEWTON;
  cfg->trans_step = d.trans_step;
  cfg->rot_step = d.rot_step;
  cfg->direct = d.direct;
  ccma_fk_config_default(&cfg->fk);
}

ccma_status ccma_solve_ik(const ccma_scene* scene, const ccma_ik_config* cfg,
                          const double* s, size_t n_s, const double* u,
                          size_t n_u, const double target[6], double* s_out,
                          double* u_out, ccma_ik_result* result) {
  return guard([&] {
    require(scene != nullptr && target != nullptr && s_out != nullptr &&
                u_out != nullptr,
            "null argument");
    const ccma::SceneModel& m = scene->model;
    const ccma::IkResult r = ccma::solve_ik_step(
        m, to_vector(s, n_s, m.num_states(), "s"),
        to_vector(u, n_u, m.num_controls(), "u"),
        Eigen::Map<const ccma::Vector6>(target), ik_from(cfg));
    copy_out(r.s_hat, s_out);
    copy_out(r.u, u_out);
    if (result) {
      result->objective = r.objective;
      result->grad_norm = r.grad_norm;
      result->energy = r.energy;
      result->task_error = r.task_error;
      result->wall_time = r.wall_time;
      result->iters = r.iters;
      result->fk_solves = r.fk_solves;
      result->bfgs_resets = r.bfgs_resets;
      result->status = ik_status_from(r.status);
    }
    const ccma_status st = status_of(r.status);
    if (st != CCMA_OK) {
      return fail(st, std::string("inverse kinematics stopped: ") +
                          ccma::ik_status_name(r.status));
    }
    return CCMA_OK;
  });
}

ccma_status ccma_waypoints_load_file(const char* path, double* poses,
                                     size_t capacity_rows, size_t* count,
                                     int* relative) {
  return guard([&] {
    require(path != nullptr && count != nullptr, "null argument");
    const ccma::Waypoints w = ccma::load_waypoints_file(path);
    *count = w.poses.size();
    if (relative) *relative = w.relative;
    if (poses != nullptr) {
      require(capacity_rows >= w.poses.size(), "waypoint buffer too small");
      for (size_t i = 0; i < w.poses.size(); ++i) {
        std::copy(w.poses[i].begin(), w.poses[i].end(), poses + 6 * i);
      }
    }
    return CCMA_OK;
  });
}

ccma_status ccma_track_run(const ccma_scene* scene, const ccma_ik_config* cfg,
                           const double* targets, size_t n_targets,
                           ccma_track** out) {
  return guard([&] {
    require(scene != nullptr && out != nullptr, "null argument");
    require(targets != nullptr || n_targets == 0, "null targets");
    *out = nullptr;
    const ccma::IkConfig ik = ik_from(cfg);
    auto track = std::make_unique<ccma_track>();
    track->model = std::make_shared<const ccma::SceneModel>(scene->model);
    const ccma::Assembly a = ccma::initial_assembly(*track->model);
    track->s0 = a.s0;
    track->u0 = a.u0;
    std::vector<ccma::EETarget> t(n_targets);
    for (size_t i = 0; i < n_targets; ++i) {
      t[i] = Eigen::Map<const ccma::Vector6>(targets + 6 * i);
    }
    track->report =
        ccma::track_waypoints(*track->model, a.s0, a.u0, t, ik);
    *out = track.release();
    return CCMA_OK;
  });
}

ccma_status ccma_track_read_csv(const ccma_scene* scene, const char* path,
                                ccma_track** out) {
  return guard([&] {
    require(scene != nullptr && path != nullptr && out != nullptr,
            "null argument");
    *out = nullptr;
    auto track = std::make_unique<ccma_track>();
    track->model = std::make_shared<const ccma::SceneModel>(scene->model);
    const ccma::Assembly a = ccma::initial_assembly(*track->model);
    track->s0 = a.s0;
    track->u0 = a.u0;
    const ccma::CsvTable table = ccma::read_csv(path);
    track->report.steps = ccma::track_steps_from_table(*track->model, table);
    for (const auto& st : track->report.steps) {
      if (st.status != ccma::IkStatus::kConverged) ++track->report.failures;
    }
    *out = track.release();
    return CCMA_OK;
  });
}

void ccma_track_free(ccma_track* track) { delete track; }

size_t ccma_track_step_count(const ccma_track* track) {
  return track ? track->report.steps.size() : 0;
}

ccma_status ccma_track_step(const ccma_track* track, size_t index,
                            ccma_track_step_info* out) {
  return guard([&] {
    require(track != nullptr && out != nullptr, "null argument");
    require(index < track->report.steps.size(), "step index out of range");
    const ccma::TrackStep& st = track->report.steps[index];
    out->waypoint = st.waypoint;
    out->substep = st.substep;
    out->status = ik_status_from(st.status);
    out->iters = st.iters;
    out->fk_solves = st.fk_solves;
    out->wall_time = st.wall_time;
    out->objective = st.objective;
    out->energy = st.energy;
    out->task_error = st.task_error;
    std::copy(st.commanded.data(), st.commanded.data() + 6, out->commanded);
    std::copy(st.achieved.data(), st.achieved.data() + 6, out->achieved);
    return CCMA_OK;
  });
}

ccma_status ccma_track_step_controls(const ccma_track* track, size_t index,
                                     double* u, size_t n_u) {
  return guard([&] {
    require(track != nullptr && u != nullptr, "null argument");
    require(index < track->report.steps.size(), "step index out of range");
    const ccma::Vector& v = track->report.steps[index].u;
    if (static_cast<Eigen::Index>(n_u) != v.size()) {
      throw StatusError(CCMA_ERR_DIMENSION_MISMATCH,
                        "control buffer size does not match the scene");
    }
    copy_out(v, u);
    return CCMA_OK;
  });
}

int ccma_track_failures(const ccma_track* track) {
  return track ? track->report.failures : 0;
}

double ccma_track_wall_time(const ccma_track* track) {
  return track ? track->report.wall_time : 0.0;
}

ccma_status ccma_track_rmse(const ccma_track* track, double rmse[6]) {
  return guard([&] {
    require(track != nullptr && rmse != nullptr, "null argument");
    std::copy(track->report.rmse.data(), track->report.rmse.data() + 6, rmse);
    return CCMA_OK;
  });
}

ccma_status ccma_track_write_csv(const ccma_track* track, const char* path) {
  return guard([&] {
    require(track != nullptr && path != nullptr, "null argument");
    ccma::write_csv(path, ccma::track_table(*track->model, track->report));
    return CCMA_OK;
  });
}

void ccma_exec_config_default(ccma_exec_config* cfg) {
  if (!cfg) return;
  const ccma::ExecutionConfig d;
  cfg->wheel_radius = d.geometry.wheel_radius;
  cfg->mount_radius = d.geometry.mount_radius;
  for (int i = 0; i < 3; ++i) {
    cfg->mount_angles[i] = d.geometry.mount_angles[i];
    cfg->kp[i] = d.gains.kp[i];
    cfg->ki[i] = d.gains.ki[i];
  }
  cfg->integrator_clamp = d.gains.integrator_clamp;
  cfg->dt = d.dt;
  cfg->hold = d.hold;
  cfg->noise_sigma = d.noise_sigma;
  cfg->seed = d.seed;
}

ccma_status ccma_execute(const ccma_track* track, const ccma_exec_config* cfg,
                         const char* base_csv, const char* ee_csv,
                         ccma_exec_result* result) {
  return guard([&] {
    require(track != nullptr, "null track");
    ccma::ExecutionConfig ec;
    if (cfg) {
      ec.geometry.wheel_radius = cfg->wheel_radius;
      ec.geometry.mount_radius = cfg->mount_radius;
      for (int i = 0; i < 3; ++i) {
        ec.geometry.mount_angles[i] = cfg->mount_angles[i];
        ec.gains.kp[i] = cfg->kp[i];
        ec.gains.ki[i] = cfg->ki[i];
      }
      ec.gains.integrator_clamp = cfg->integrator_clamp;
      ec.dt = cfg->dt;
      ec.hold = cfg->hold;
      ec.noise_sigma = cfg->noise_sigma;
      ec.seed = cfg->seed;
    }
    const ccma::ExecutionReport r = ccma::simulate_execution(
        *track->model, track->s0, track->u0, track->report.steps, ec);
    if (base_csv) ccma::write_csv(base_csv, ccma::exec_base_table(r));
    if (ee_csv) ccma::write_csv(ee_csv, ccma::exec_ee_table(r));
    if (result) {
      result->ee_rmse = r.ee_rmse;
      result->ee_rmse_yaw = r.ee_rmse_yaw;
      result->fk_failures = r.fk_failures;
      result->samples = r.ee_samples.size();
    }
    return CCMA_OK;
  });
}

void ccma_validate_config_default(ccma_validate_config* cfg) {
  if (!cfg) return;
  const ccma::ValidationConfig d;
  cfg->local_trials = d.local_trials;
  cfg->pipeline_trials = d.pipeline_trials;
  cfg->h_local = d.h_local;
  cfg->h_pipeline = d.h_pipeline;
  cfg->tol_local = d.tol_local;
  cfg->tol_pipeline = d.tol_pipeline;
  cfg->seed = d.seed;
  cfg->corrupt_layer = -1;
}

const char* ccma_layer_name(int layer) {
  if (layer < 0 || layer >= ccma::kNumDerivativeLayers) return nullptr;
  return ccma::layer_name(static_cast<ccma::DerivativeLayer>(layer));
}

int ccma_layer_from_name(const char* name) {
  if (!name) return -1;
  const auto layer = ccma::parse_layer(name);
  return layer ? static_cast<int>(*layer) : -1;
}

ccma_status ccma_validate_gradients(const ccma_scene* scene,
                                    const ccma_validate_config* cfg,
                                    const char* csv_path,
                                    ccma_validate_result* result) {
  return guard([&] {
    require(scene != nullptr, "null scene");
    ccma::ValidationConfig vc;
    if (cfg) {
      vc.local_trials = cfg->local_trials;
      vc.pipeline_trials = cfg->pipeline_trials;
      vc.h_local = cfg->h_local;
      vc.h_pipeline = cfg->h_pipeline;
      vc.tol_local = cfg->tol_local;
      vc.tol_pipeline = cfg->tol_pipeline;
      vc.seed = cfg->seed;
      if (cfg->corrupt_layer >= 0) {
        require(cfg->corrupt_layer < ccma::kNumDerivativeLayers,
                "unknown derivative layer");
        vc.corrupt = static_cast<ccma::DerivativeLayer>(cfg->corrupt_layer);
      }
    }
    const ccma::ValidationReport r =
        ccma::validate_gradients(scene->model, vc);
    if (csv_path) ccma::write_csv(csv_path, ccma::validation_table(r));
    if (result) {
      result->passed = r.passed;
      result->wall_time = r.wall_time;
      for (size_t i = 0; i < r.layers.size() && i < CCMA_NUM_LAYERS; ++i) {
        const ccma::LayerResult& l = r.layers[i];
        ccma_layer_result& o = result->layers[i];
        o.layer = static_cast<int>(l.layer);
        o.max_rel_error = l.max_rel_error;
        o.tolerance = l.tolerance;
        o.trials = l.trials;
        o.worst_trial = l.worst_trial;
        o.passed = l.passed;
        copy_string(o.worst_entry, l.worst_entry);
      }
    }
    if (!r.passed) {
      std::string msg = "derivative validation failed:";
      for (const ccma::LayerResult& l : r.layers) {
        if (!l.passed) {
          msg += std::string(" ") + ccma::layer_name(l.layer) + " (" +
                 l.worst_entry + ")";
        }
      }
      return fail(CCMA_ERR_VALIDATION_FAILED, msg);
    }
    return CCMA_OK;
  });
}

void ccma_bench_config_default(ccma_bench_config* cfg) {
  if (!cfg) return;
  const ccma::BenchConfig d;
  cfg->reps = d.reps;
  cfg->translation = d.translation;
  cfg->rotation = d.rotation;
  cfg->seed = d.seed;
  ccma_ik_config_default(&cfg->ik);
}

ccma_status ccma_bench_run(const ccma_scene* const* scenes, size_t n_scenes,
                           const ccma_bench_config* cfg, ccma_bench** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    require(scenes != nullptr || n_scenes == 0, "null scene list");
    *out = nullptr;
    ccma::BenchConfig bc;
    if (cfg) {
      bc.reps = cfg->reps;
      bc.translation = cfg->translation;
      bc.rotation = cfg->rotation;
      bc.seed = cfg->seed;
      bc.ik = ik_from(&cfg->ik);
    }
    auto bench = std::make_unique<ccma_bench>();
    for (size_t i = 0; i < n_scenes; ++i) {
      require(scenes[i] != nullptr, "null scene in list");
      bench->summaries.push_back(ccma::bench_scene(scenes[i]->model, bc));
    }
    *out = bench.release();
    return CCMA_OK;
  });
}

void ccma_bench_free(ccma_bench* bench) { delete bench; }

size_t ccma_bench_count(const ccma_bench* bench) {
  return bench ? bench->summaries.size() : 0;
}

ccma_status ccma_bench_summary_get(const ccma_bench* bench, size_t index,
                                   ccma_bench_summary* out) {
  return guard([&] {
    require(bench != nullptr && out != nullptr, "null argument");
    require(index < bench->summaries.size(), "index out of range");
    const ccma::BenchSummary& s = bench->summaries[index];
    copy_string(out->scene, s.scene);
    out->bodies = s.bodies;
    out->bases = s.bases;
    out->free_controls = s.free_controls;
    out->reps = s.reps;
    out->converged = s.converged;
    out->mean_time = s.mean_time;
    out->median_time = s.median_time;
    out->min_time = s.min_time;
    out->max_time = s.max_time;
    out->mean_iters = s.mean_iters;
    return CCMA_OK;
  });
}

ccma_status ccma_bench_write_csv(const ccma_bench* bench,
                                 const char* summary_csv,
                                 const char* runs_csv) {
  return guard([&] {
    require(bench != nullptr && summary_csv != nullptr, "null argument");
    ccma::write_csv(summary_csv, ccma::bench_table(bench->summaries));
    if (runs_csv) {
      ccma::write_csv(runs_csv, ccma::bench_runs_table(bench->summaries));
    }
    return CCMA_OK;
  });
}

}  // extern "C"
