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

#ifndef CCMA_FORWARD_SOLVER_HPP_
#define CCMA_FORWARD_SOLVER_HPP_

#include "constraints.hpp"
#include "model.hpp"

namespace ccma {

enum class HessianMode { kFull, kGaussNewton };

struct FkConfig {
  double grad_tol = 1e-10;  // on ||dE/ds||_inf
  int max_iters = 100;
  // Levenberg diagonal damping: multiplied by 10 on a rejected step and
  // divided by 10 (never below the initial value) on an accepted one.
  double damping = 1e-9;
  double max_damping = 1e12;
  HessianMode hessian_mode = HessianMode::kFull;

  // Throws InvalidArgument.
  void validate() const;
};

enum class SolveStatus { kConverged, kNonConvergence, kSolverBreakdown };
const char* solve_status_name(SolveStatus status);

struct SolveReport {
  Vector s_hat;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  double wall_time = 0.0;  // seconds
  bool converged = false;
  SolveStatus status = SolveStatus::kNonConvergence;
};

// E(s, u) = 1/2 C^T C.
double energy(const SceneModel& model, const Vector& s, const Vector& u);
// G = dE/ds = J_s^T C.
Vector energy_gradient(const SceneModel& model, const Vector& s,
                       const Vector& u);
// d2E/ds2 = J_s^T J_s (+ sum_r C_r d2C_r/ds2 in kFull mode).
Matrix energy_hessian(const SceneModel& model, const Vector& s, const Vector& u,
                      HessianMode mode = HessianMode::kFull);
// dG/du = J_s^T J_u + sum_r C_r d2C_r/(ds du).
Matrix mixed_derivative(const SceneModel& model, const Vector& s,
                        const Vector& u);
// dE/du at fixed s = J_u^T C.
Vector energy_control_gradient(const SceneModel& model, const Vector& s,
                               const Vector& u);

struct EnergyDerivatives {
  double energy = 0.0;
  Vector c;
  Vector gradient;
  Matrix hessian;
  Matrix mixed;           // dG/du, only with controls requested
  Vector control_gradient;  // dE/du
};

EnergyDerivatives energy_derivatives(const SceneModel& model, const Vector& s,
                                     const Vector& u, HessianMode mode,
                                     bool with_controls);

// Damped Newton minimization of E over s with u fixed, started at s_init.
SolveReport solve_fk(const SceneModel& model, const Vector& s_init,
                     const Vector& u, const FkConfig& cfg = {});

// ds/du = -(dG/ds)^{-1} dG/du at a converged forward solution. Throws
// SingularSensitivity when the Hessian stays singular under damping.
Matrix state_sensitivity(const SceneModel& model, const Vector& s_hat,
                         const Vector& u, const FkConfig& cfg = {});

// Solves hessian * X = rhs with the same damping fallback; shared by
// state_sensitivity and the objective gradient.
Matrix solve_sensitivity_system(const Matrix& hessian, const Matrix& rhs,
                                double initial_damping);

}  // namespace ccma

#endif  // CCMA_FORWARD_SOLVER_HPP_
