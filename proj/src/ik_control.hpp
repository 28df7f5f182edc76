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


#ifndef CCMA_IK_CONTROL_HPP_
#define CCMA_IK_CONTROL_HPP_

#include <vector>

#include "constraints.hpp"
#include "forward_solver.hpp"
#include "model.hpp"

namespace ccma {

// End-effector pose (x, y, z, gamma, beta, alpha). Only the coordinates
// selected by the scene's task mask take part in the objective.
using EETarget = Vector6;

// Starting matrix of the inverse-Hessian approximation, used on the first
// iteration and after every reset.
enum class BfgsInit {
  kScaledIdentity,  // I / |dO/du|
  // Pseudo-inverse of J_t^T J_t, J_t being the masked task rows of ds/du over
  // the free controls; directions outside its range get 1 / lambda_max.
  kTaskGaussNewton,
};

struct IkConfig {
  double lambda = 0.1;  // residual-energy weight, 0 < lambda < 1
  double grad_tol = 1e-8;  // on ||dO/du||_inf over the free controls
  // Also stop once O falls below this; the gradient of an exactly reached
  // target can sit at round-off level above grad_tol on badly scaled scenes.
  double objective_tol = 1e-20;
  int max_outer_iters = 200;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_line_search = 40;
  // Infinity-norm cap on one BFGS step in control space (m or rad).
  double max_control_step = 0.05;
  // Curvature pairs with y's <= curvature_tol * |y| |s| reset the
  // inverse-Hessian approximation.
  double curvature_tol = 1e-10;
  // Trial controls whose forward solve stalls above this residual energy do
  // not assemble and are rejected by the line search.
  double max_residual_energy = 1e-14;
  BfgsInit bfgs_init = BfgsInit::kTaskGaussNewton;
  // Eigenvalues of J_t^T J_t below this fraction of the largest count as zero.
  double init_regularization = 1e-6;
  double trans_step = 0.010;  // m
  double rot_step = 0.005;    // rad
  bool direct = false;  // track whole waypoints without subdivision
  FkConfig fk;

  // Throws InvalidArgument.
  void validate() const;
};

enum class IkStatus {
  kConverged,
  kMaxIters,
  kLineSearchFailure,
  kSingularSensitivity,
  kForwardFailure,
};
const char* ik_status_name(IkStatus status);

// Inverse-Hessian approximation over the free controls, carried between
// calls of solve_ik_step. An empty matrix means "start from a scaled
// identity".
struct BfgsState {
  Matrix inv_hessian;
  void reset() { inv_hessian.resize(0, 0); }
};

struct IkResult {
  Vector u;
  Vector s_hat;
  double objective = 0.0;
  double grad_norm = 0.0;
  double energy = 0.0;
  double task_error = 0.0;  // masked ||X_EE - X*||_inf
  int iters = 0;
  int fk_solves = 0;
  int bfgs_resets = 0;
  double wall_time = 0.0;
  IkStatus status = IkStatus::kMaxIters;
  bool converged() const { return status == IkStatus::kConverged; }
};

Vector6 ee_state(const SceneModel& model, const Vector& s);

// mask * (X_EE - target), zero on masked-out coordinates.
Vector6 task_residual(const SceneModel& model, const Vector& s,
                      const EETarget& target);

// O = 1/2 |mask * (X_EE - X*)|^2 + lambda * E(s_hat, u).
double objective(const SceneModel& model, const Vector& s_hat, const Vector& u,
                 const EETarget& target, double lambda);

// dO/du over all 3 n_m control slots, using ds/du from the sensitivity
// system. Requires s_hat to be a converged forward solution for u.
Vector objective_gradient(const SceneModel& model, const Vector& s_hat,
                          const Vector& u, const EETarget& target,
                          double lambda, const FkConfig& fk = {});

// Rows of d X_EE / du (6 x 3 n_m) at a converged forward solution; masked-out
// rows are zero.
Matrix task_jacobian(const SceneModel& model, const Vector& s_hat,
                     const Vector& u, const FkConfig& fk = {});

// BFGS descent on the free controls from a feasible (s, u). Every trial u is
// checked by a warm-started forward solve; trials that do not assemble are
// rejected by the line search. `bfgs` may be null.
IkResult solve_ik_step(const SceneModel& model, const Vector& s,
                       const Vector& u, const EETarget& target,
                       const IkConfig& cfg, BfgsState* bfgs = nullptr);

struct TrackStep {
  int waypoint = 0;
  int substep = 0;
  EETarget commanded = EETarget::Zero();
  Vector6 achieved = Vector6::Zero();
  Vector u;
  Vector s_hat;
  int iters = 0;
  int fk_solves = 0;
  double wall_time = 0.0;
  double objective = 0.0;
  double energy = 0.0;
  double task_error = 0.0;
  IkStatus status = IkStatus::kConverged;
};

struct TrackReport {
  std::vector<TrackStep> steps;  // ordered by waypoint, then sub-step
  // Achieved vs commanded per task coordinate; 0 on masked-out coordinates.
  Vector6 rmse = Vector6::Zero();
  int failures = 0;
  double wall_time = 0.0;
};

// Number of equal sub-steps that keeps every masked position increment at or
// below trans_step and every masked angle increment at or below rot_step.
int substep_count(const TaskMask& mask, const Vector6& delta, double trans_step,
                  double rot_step);

// Tracks the targets in order. Each waypoint is split into sub-targets
// interpolated from the previous commanded pose (the start pose before the
// first waypoint); masked-out coordinates are held at their start values.
// A failed sub-step is recorded and tracking continues from the best
// feasible (s, u) found.
TrackReport track_waypoints(const SceneModel& model, const Vector& s0,
                            const Vector& u0,
                            const std::vector<EETarget>& targets,
                            const IkConfig& cfg);

}  // namespace ccma

#endif  // CCMA_IK_CONTROL_HPP_
