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


#include "ik_control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace ccma {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

Vector gather(const Vector& full, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out[k] = full[idx[k]];
  return out;
}

// State index of end-effector coordinate c (x, y, z, gamma, beta, alpha).
int ee_index(const SceneModel& model, int c) {
  const int base = kBodyDofs * model.end_effector.body;
  return base + (c < 3 ? 3 + c : c - 3);
}

struct Evaluation {
  Vector s_hat;
  double objective = 0.0;
  double energy = 0.0;
  bool assembled = false;
  int fk_iters = 0;
};

Evaluation evaluate(const SceneModel& model, const Vector& s_init,
                    const Vector& u, const EETarget& target,
                    const IkConfig& cfg) {
  const SolveReport fk = solve_fk(model, s_init, u, cfg.fk);
  Evaluation ev;
  ev.s_hat = fk.s_hat;
  ev.energy = fk.energy;
  ev.fk_iters = fk.iters;
  ev.assembled = fk.converged && fk.energy <= cfg.max_residual_energy;
  if (ev.assembled) {
    ev.objective = 0.5 * task_residual(model, fk.s_hat, target).squaredNorm() +
                   cfg.lambda * fk.energy;
  }
  return ev;
}

double masked_error(const SceneModel& model, const Vector& s,
                    const EETarget& target) {
  return task_residual(model, s, target).cwiseAbs().maxCoeff();
}

}  // namespace

void IkConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in (0, 1)");
  }
  if (!(trans_step > 0.0) || !(rot_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step limits must be positive");
  }
  if (!(grad_tol > 0.0) || !(objective_tol >= 0.0) || max_outer_iters < 1 ||
      !(armijo > 0.0 && armijo < 1.0) || !(shrink > 0.0 && shrink < 1.0) ||
      max_line_search < 1 || !(max_control_step > 0.0) ||
      !(curvature_tol >= 0.0) || !(max_residual_energy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid optimizer settings");
  }
  fk.validate();
}

const char* ik_status_name(IkStatus status) {
  switch (status) {
    case IkStatus::kConverged: return "converged";
    case IkStatus::kMaxIters: return "max_iters";
    case IkStatus::kLineSearchFailure: return "line_search_failure";
    case IkStatus::kSingularSensitivity: return "singular_sensitivity";
    case IkStatus::kForwardFailure: return "forward_failure";
  }
  return "?";
}

Vector6 ee_state(const SceneModel& model, const Vector& s) {
  if (model.end_effector.body < 0 ||
      kBodyDofs * (model.end_effector.body + 1) > s.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state vector does not contain the end-effector body");
  }
  Vector6 x;
  for (int c = 0; c < kTaskDims; ++c) x[c] = s[ee_index(model, c)];
  return x;
}

Vector6 task_residual(const SceneModel& model, const Vector& s,
                      const EETarget& target) {
  Vector6 r = ee_state(model, s) - target;
  for (int c = 0; c < kTaskDims; ++c) {
    if (!model.end_effector.mask[c]) r[c] = 0.0;
  }
  return r;
}

double objective(const SceneModel& model, const Vector& s_hat, const Vector& u,
                 const EETarget& target, double lambda) {
  return 0.5 * task_residual(model, s_hat, target).squaredNorm() +
         lambda * energy(model, s_hat, u);
}

Vector objective_gradient(const SceneModel& model, const Vector& s_hat,
                          const Vector& u, const EETarget& target,
                          double lambda, const FkConfig& fk) {
  const EnergyDerivatives d =
      energy_derivatives(model, s_hat, u, HessianMode::kFull, true);
  // Adjoint form of r^T P ds/du: one solve H w = P^T r.
  const Vector6 r = task_residual(model, s_hat, target);
  Vector rhs = Vector::Zero(model.num_states());
  for (int c = 0; c < kTaskDims; ++c) rhs[ee_index(model, c)] = r[c];
  const Vector w = solve_sensitivity_system(d.hessian, rhs, fk.damping);
  return -d.mixed.transpose() * w + lambda * d.control_gradient;
}

Matrix task_jacobian(const SceneModel& model, const Vector& s_hat,
                     const Vector& u, const FkConfig& fk) {
  const Matrix ds_du = state_sensitivity(model, s_hat, u, fk);
  Matrix jt = Matrix::Zero(kTaskDims, model.num_controls());
  for (int c = 0; c < kTaskDims; ++c) {
    if (model.end_effector.mask[c]) jt.row(c) = ds_du.row(ee_index(model, c));
  }
  return jt;
}

IkResult solve_ik_step(const SceneModel& model, const Vector& s,
                       const Vector& u, const EETarget& target,
                       const IkConfig& cfg, BfgsState* bfgs) {
  cfg.validate();
  const auto start = Clock::now();
  const std::vector<int> free = model.free_controls();
  const auto nf = static_cast<Eigen::Index>(free.size());
  BfgsState local;
  BfgsState& state = bfgs ? *bfgs : local;
  if (state.inv_hessian.rows() != nf) state.reset();

  IkResult res;
  res.u = u;
  Evaluation cur = evaluate(model, s, u, target, cfg);
  res.fk_solves = 1;
  auto finish = [&](IkStatus status) {
    res.status = status;
    res.s_hat = cur.s_hat;
    res.objective = cur.objective;
    res.energy = cur.energy;
    res.task_error = masked_error(model, cur.s_hat, target);
    res.wall_time = seconds_since(start);
    return res;
  };
  if (!cur.assembled) return finish(IkStatus::kForwardFailure);

  auto free_gradient = [&](const Vector& s_hat, const Vector& uu) {
    return gather(objective_gradient(model, s_hat, uu, target, cfg.lambda, cfg.fk),
                  free);
  };
  Vector g;
  try {
    g = free_gradient(cur.s_hat, res.u);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularSensitivity) throw;
    return finish(IkStatus::kSingularSensitivity);
  }

  // Scaled identity is the fallback whenever the Gauss-Newton start is not
  // available or does not give a descent direction.
  auto initial_matrix = [&](bool identity) -> Matrix {
    if (!identity && cfg.bfgs_init == BfgsInit::kTaskGaussNewton) {
      const Matrix jt = task_jacobian(model, cur.s_hat, res.u, cfg.fk);
      Matrix jf(kTaskDims, nf);
      for (Eigen::Index k = 0; k < nf; ++k) jf.col(k) = jt.col(free[k]);
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(jf.transpose() * jf);
      const double top = eig.eigenvalues().maxCoeff();
      if (top > 0.0) {
        // Directions the task does not see get the stiffest curvature.
        Vector inv = eig.eigenvalues();
        for (Eigen::Index k = 0; k < nf; ++k) {
          inv[k] = inv[k] > cfg.init_regularization * top ? 1.0 / inv[k] : 1.0 / top;
        }
        return eig.eigenvectors() * inv.asDiagonal() *
               eig.eigenvectors().transpose();
      }
    }
    return Matrix::Identity(nf, nf) / g.norm();
  };

  bool fresh = state.inv_hessian.size() == 0;
  while (true) {
    res.grad_norm = inf_norm(g);
    if (res.grad_norm <= cfg.grad_tol || cur.objective <= cfg.objective_tol) {
      return finish(IkStatus::kConverged);
    }
    if (res.iters >= cfg.max_outer_iters) return finish(IkStatus::kMaxIters);
    ++res.iters;

    try {
      if (state.inv_hessian.size() == 0) {
        state.inv_hessian = initial_matrix(false);
        fresh = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularSensitivity) throw;
      return finish(IkStatus::kSingularSensitivity);
    }
    Vector p = -state.inv_hessian * g;
    if (!(g.dot(p) < 0.0)) {
      ++res.bfgs_resets;
      state.inv_hessian = initial_matrix(true);
      fresh = true;
      p = -state.inv_hessian * g;
    }
    const double p_max = inf_norm(p);
    if (p_max > cfg.max_control_step) p *= cfg.max_control_step / p_max;

    const double slope = g.dot(p);
    double t = 1.0;
    bool accepted = false;
    Vector u_trial = res.u;
    Evaluation trial;
    for (int ls = 0; ls < cfg.max_line_search; ++ls, t *= cfg.shrink) {
      u_trial = res.u;
      for (Eigen::Index k = 0; k < nf; ++k) u_trial[free[k]] += t * p[k];
      trial = evaluate(model, cur.s_hat, u_trial, target, cfg);
      ++res.fk_solves;
      if (trial.assembled &&
          trial.objective <= cur.objective + cfg.armijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) return finish(IkStatus::kLineSearchFailure);
      // Retry once from the scaled identity.
      state.reset();
      ++res.bfgs_resets;
      continue;
    }

    Vector g_new;
    try {
      g_new = free_gradient(trial.s_hat, u_trial);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularSensitivity) throw;
      return finish(IkStatus::kSingularSensitivity);
    }
    const Vector sk = gather(u_trial, free) - gather(res.u, free);
    const Vector yk = g_new - g;
    const double ys = yk.dot(sk);
    if (ys > cfg.curvature_tol * yk.norm() * sk.norm()) {
      Matrix& h = state.inv_hessian;
      if (fresh && cfg.bfgs_init == BfgsInit::kScaledIdentity) {
        h = Matrix::Identity(nf, nf) * (ys / yk.squaredNorm());
      }
      const double rho = 1.0 / ys;
      const Vector hy = h * yk;
      h += (rho * rho * yk.dot(hy) + rho) * (sk * sk.transpose()) -
           rho * (hy * sk.transpose() + sk * hy.transpose());
      fresh = false;
    } else {
      state.reset();
      ++res.bfgs_resets;
    }
    res.u = u_trial;
    cur = std::move(trial);
    g = std::move(g_new);
  }
}

int substep_count(const TaskMask& mask, const Vector6& delta, double trans_step,
                  double rot_step) {
  double pos = 0.0, ang = 0.0;
  for (int c = 0; c < 3; ++c) {
    if (mask[c]) pos += delta[c] * delta[c];
    if (mask[c + 3]) ang = std::max(ang, std::abs(delta[c + 3]));
  }
  constexpr double kSlack = 1e-9;
  const double n = std::max(std::ceil(std::sqrt(pos) / trans_step - kSlack),
                            std::ceil(ang / rot_step - kSlack));
  return std::max(1, static_cast<int>(n));
}

TrackReport track_waypoints(const SceneModel& model, const Vector& s0,
                            const Vector& u0,
                            const std::vector<EETarget>& targets,
                            const IkConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  TrackReport report;
  if (targets.empty()) return report;
  for (const EETarget& t : targets) {
    if (!t.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite waypoint");
    }
  }
  const TaskMask& mask = model.end_effector.mask;
  Vector s = s0;
  Vector u = u0;
  const Vector6 start_pose = ee_state(model, s0);
  EETarget commanded = start_pose;

  for (size_t w = 0; w < targets.size(); ++w) {
    EETarget goal = targets[w];
    for (int c = 0; c < kTaskDims; ++c) {
      if (!mask[c]) goal[c] = start_pose[c];
    }
    const Vector6 delta = goal - commanded;
    const int n = cfg.direct ? 1
                             : substep_count(mask, delta, cfg.trans_step,
                                             cfg.rot_step);
    const EETarget from = commanded;
    BfgsState bfgs;
    for (int k = 1; k <= n; ++k) {
      commanded = k == n ? goal : EETarget(from + (double(k) / n) * delta);
      const IkResult r = solve_ik_step(model, s, u, commanded, cfg, &bfgs);
      TrackStep step;
      step.waypoint = static_cast<int>(w);
      step.substep = k - 1;
      step.commanded = commanded;
      step.status = r.status;
      step.iters = r.iters;
      step.fk_solves = r.fk_solves;
      step.wall_time = r.wall_time;
      if (r.status != IkStatus::kForwardFailure) {
        s = r.s_hat;
        u = r.u;
      }
      step.u = u;
      step.s_hat = s;
      step.achieved = ee_state(model, s);
      step.objective = objective(model, s, u, commanded, cfg.lambda);
      step.energy = energy(model, s, u);
      step.task_error = masked_error(model, s, commanded);
      if (!r.converged()) ++report.failures;
      report.steps.push_back(std::move(step));
    }
  }

  Vector6 sq = Vector6::Zero();
  for (const TrackStep& st : report.steps) {
    sq += task_residual(model, st.s_hat, st.commanded).cwiseAbs2();
  }
  report.rmse = (sq / static_cast<double>(report.steps.size())).cwiseSqrt();
  report.wall_time = seconds_since(start);
  return report;
}

}  // namespace ccma
