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

#include "forward_solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>

#include "error.hpp"

namespace ccma {
namespace {

// Largest damping tolerated when solving the sensitivity system.
constexpr double kMaxSensitivityDamping = 1e-6;
constexpr double kMinReciprocalCondition = 1e-13;

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace

void FkConfig::validate() const {
  if (!(grad_tol > 0.0) || !(damping > 0.0) || !(max_damping > damping) ||
      max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "forward solver config needs grad_tol > 0, damping > 0, "
                "max_damping > damping and max_iters >= 1");
  }
}

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kNonConvergence: return "non_convergence";
    case SolveStatus::kSolverBreakdown: return "solver_breakdown";
  }
  return "?";
}

double energy(const SceneModel& model, const Vector& s, const Vector& u) {
  return 0.5 * assemble_C(model, s, u).squaredNorm();
}

EnergyDerivatives energy_derivatives(const SceneModel& model, const Vector& s,
                                     const Vector& u, HessianMode mode,
                                     bool with_controls) {
  check_dimensions(model, s, u);
  const bool curvature = mode == HessianMode::kFull || with_controls;
  const int ns = model.num_states(), nu = model.num_controls();
  EnergyDerivatives d;
  d.c = Vector::Zero(model.num_rows);
  d.gradient = Vector::Zero(ns);
  d.hessian = Matrix::Zero(ns, ns);
  if (with_controls) {
    d.mixed = Matrix::Zero(ns, nu);
    d.control_gradient = Vector::Zero(nu);
  }
  // J^T J and J^T C accumulated block by block.
  for (const ConstraintBlock& block : model.blocks) {
    const BlockDerivatives bd = block_derivatives(block, s, u, curvature);
    d.c.segment(block.row_offset, block.rows()) = bd.value;
    const Vector g = bd.jacobian.transpose() * bd.value;
    Matrix h = bd.jacobian.transpose() * bd.jacobian;
    Matrix h_gn;
    if (curvature) {
      if (mode == HessianMode::kGaussNewton) h_gn = h;
      for (int r = 0; r < block.rows(); ++r) {
        if (bd.value[r] != 0.0) h += bd.value[r] * bd.hessian[r];
      }
    }
    const Matrix& h_ss = mode == HessianMode::kGaussNewton && curvature ? h_gn : h;
    const int nv = static_cast<int>(bd.vars.size());
    for (int a = 0; a < nv; ++a) {
      const VarRef& va = bd.vars[a];
      if (va.space == VarRef::Space::kControl) {
        if (with_controls) d.control_gradient[va.index] += g[a];
        continue;
      }
      d.gradient[va.index] += g[a];
      for (int b = 0; b < nv; ++b) {
        const VarRef& vb = bd.vars[b];
        if (vb.space == VarRef::Space::kState) {
          d.hessian(va.index, vb.index) += h_ss(a, b);
        } else if (with_controls) {
          d.mixed(va.index, vb.index) += h(a, b);
        }
      }
    }
  }
  d.energy = 0.5 * d.c.squaredNorm();
  return d;
}

Vector energy_gradient(const SceneModel& model, const Vector& s,
                       const Vector& u) {
  const Linearization lin = linearize(model, s, u, false);
  return lin.jac_s.transpose() * lin.c;
}

Matrix energy_hessian(const SceneModel& model, const Vector& s, const Vector& u,
                      HessianMode mode) {
  return energy_derivatives(model, s, u, mode, false).hessian;
}

Matrix mixed_derivative(const SceneModel& model, const Vector& s,
                        const Vector& u) {
  return energy_derivatives(model, s, u, HessianMode::kGaussNewton, true).mixed;
}

Vector energy_control_gradient(const SceneModel& model, const Vector& s,
                               const Vector& u) {
  const Linearization lin = linearize(model, s, u, false);
  return lin.jac_u.transpose() * lin.c;
}

SolveReport solve_fk(const SceneModel& model, const Vector& s_init,
                     const Vector& u, const FkConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = model.num_states();

  SolveReport report;
  report.s_hat = s_init;
  if (!s_init.allFinite() || !u.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite state or control");
  }
  EnergyDerivatives d =
      energy_derivatives(model, report.s_hat, u, cfg.hessian_mode, false);
  double mu = cfg.damping;
  report.status = SolveStatus::kNonConvergence;

  while (true) {
    report.grad_norm = inf_norm(d.gradient);
    report.energy = d.energy;
    if (report.grad_norm <= cfg.grad_tol) {
      report.status = SolveStatus::kConverged;
      break;
    }
    if (report.iters >= cfg.max_iters) break;
    ++report.iters;

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      Eigen::LLT<Matrix> llt(d.hessian + mu * Matrix::Identity(n, n));
      if (llt.info() == Eigen::Success) {
        const Vector step = llt.solve(-d.gradient);
        const Vector trial = report.s_hat + step;
        const double trial_energy = energy(model, trial, u);
        if (std::isfinite(trial_energy) && trial_energy < d.energy) {
          report.s_hat = trial;
          d = energy_derivatives(model, report.s_hat, u, cfg.hessian_mode, false);
          mu = std::max(mu / 10.0, cfg.damping);
          accepted = true;
          continue;
        }
        // A full-rank damped step that cannot lower E: the iterate sits on
        // a stationary point up to round-off.
        if (mu >= cfg.max_damping) {
          stalled = true;
          break;
        }
      } else if (mu >= cfg.max_damping) {
        report.status = SolveStatus::kSolverBreakdown;
        break;
      }
      mu *= 10.0;
    }
    if (report.status == SolveStatus::kSolverBreakdown || stalled) break;
  }

  report.converged = report.status == SolveStatus::kConverged;
  report.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return report;
}

Matrix solve_sensitivity_system(const Matrix& hessian, const Matrix& rhs,
                                double initial_damping) {
  const int n = static_cast<int>(hessian.rows());
  double mu = 0.0;
  while (true) {
    Eigen::LLT<Matrix> llt(hessian + mu * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success && llt.rcond() >= kMinReciprocalCondition) {
      return llt.solve(rhs);
    }
    mu = mu == 0.0 ? initial_damping : mu * 10.0;
    if (mu > kMaxSensitivityDamping) {
      throw Error(ErrorCode::kSingularSensitivity,
                  "energy Hessian is singular at the forward solution "
                  "(kinematic singularity)");
    }
  }
}

Matrix state_sensitivity(const SceneModel& model, const Vector& s_hat,
                         const Vector& u, const FkConfig& cfg) {
  const EnergyDerivatives d =
      energy_derivatives(model, s_hat, u, HessianMode::kFull, true);
  return solve_sensitivity_system(d.hessian, -d.mixed, cfg.damping);
}

}  // namespace ccma
