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


#include "validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "assembly.hpp"
#include "constraints.hpp"
#include "error.hpp"
#include "ik_control.hpp"

namespace ccma {

namespace {

constexpr const char* kLayerNames[kNumDerivativeLayers] = {
    "block_jacobian",   "energy_gradient",   "energy_hessian",
    "mixed_derivative", "state_sensitivity", "objective_gradient",
};

struct Comparison {
  double error = 0.0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
};

Comparison compare(const Matrix& analytic, const Matrix& reference) {
  Comparison out;
  if (analytic.size() == 0) return out;
  const Matrix diff = (analytic - reference).cwiseAbs();
  const double worst = diff.maxCoeff(&out.row, &out.col);
  const double scale = reference.cwiseAbs().maxCoeff();
  out.error = scale > 0.0 ? worst / scale : worst;
  return out;
}

std::string entry_text(const Comparison& c) {
  std::ostringstream os;
  os << "row " << c.row << ", col " << c.col;
  return os.str();
}

void corrupt_if(const ValidationConfig& cfg, DerivativeLayer layer,
                Matrix& analytic) {
  if (cfg.corrupt != layer || analytic.size() == 0) return;
  analytic(0, 0) += 1e-2 * std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

void record(LayerResult& result, const Comparison& c, int trial,
            const std::string& where) {
  ++result.trials;
  if (result.worst_trial < 0 || !(c.error <= result.max_rel_error)) {
    result.max_rel_error = c.error;
    result.worst_trial = trial;
    result.worst_entry = where;
  }
}

Matrix fd_block(const ConstraintBlock& block, const std::vector<VarRef>& vars,
                const Vector& s, const Vector& u, double h) {
  Matrix out(block.rows(), static_cast<Eigen::Index>(vars.size()));
  for (std::size_t k = 0; k < vars.size(); ++k) {
    Vector sp = s, sm = s, up = u, um = u;
    if (vars[k].space == VarRef::Space::kState) {
      sp[vars[k].index] += h;
      sm[vars[k].index] -= h;
    } else {
      up[vars[k].index] += h;
      um[vars[k].index] -= h;
    }
    out.col(static_cast<Eigen::Index>(k)) =
        (eval_block(block, sp, up) - eval_block(block, sm, um)) / (2.0 * h);
  }
  return out;
}

Vector fd_energy_gradient(const SceneModel& model, const Vector& s,
                          const Vector& u, double h) {
  Vector g(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    Vector sp = s, sm = s;
    sp[k] += h;
    sm[k] -= h;
    g[k] = (energy(model, sp, u) - energy(model, sm, u)) / (2.0 * h);
  }
  return g;
}

Matrix fd_gradient_wrt(const SceneModel& model, const Vector& s,
                       const Vector& u, double h, bool wrt_controls) {
  const Eigen::Index n = wrt_controls ? u.size() : s.size();
  Matrix out(s.size(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vector sp = s, sm = s, up = u, um = u;
    if (wrt_controls) {
      up[k] += h;
      um[k] -= h;
    } else {
      sp[k] += h;
      sm[k] -= h;
    }
    out.col(k) = (energy_gradient(model, sp, up) -
                  energy_gradient(model, sm, um)) /
                 (2.0 * h);
  }
  return out;
}

Vector solve_tight(const SceneModel& model, const Vector& s_init,
                   const Vector& u, const FkConfig& fk) {
  const SolveReport rep = solve_fk(model, s_init, u, fk);
  if (!rep.converged) {
    throw Error(ErrorCode::kInfeasibleScene,
                "forward solve did not converge during validation (" +
                    std::string(solve_status_name(rep.status)) + ")");
  }
  return rep.s_hat;
}

}  // namespace

const char* layer_name(DerivativeLayer layer) {
  return kLayerNames[static_cast<int>(layer)];
}

std::optional<DerivativeLayer> parse_layer(const std::string& name) {
  for (int i = 0; i < kNumDerivativeLayers; ++i) {
    if (name == kLayerNames[i]) return static_cast<DerivativeLayer>(i);
  }
  return std::nullopt;
}

bool is_local_layer(DerivativeLayer layer) {
  return layer != DerivativeLayer::kStateSensitivity &&
         layer != DerivativeLayer::kObjectiveGradient;
}

void ValidationConfig::validate() const {
  if (local_trials < 1 || pipeline_trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
  }
  if (!(h_local > 0.0) || !(h_pipeline > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step h must be positive");
  }
  if (!(tol_local > 0.0) || !(tol_pipeline > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
  }
  if (state_noise < 0.0 || control_noise < 0.0 || target_noise < 0.0 ||
      lambda < 0.0 || !(fk_grad_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "noise, lambda and fk_grad_tol must be non-negative");
  }
}

double relative_error(const Matrix& analytic, const Matrix& reference) {
  if (analytic.rows() != reference.rows() ||
      analytic.cols() != reference.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "relative_error: shape mismatch");
  }
  return compare(analytic, reference).error;
}

ValidationReport validate_gradients(const SceneModel& model,
                                    const ValidationConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Assembly asmb = initial_assembly(model);
  const std::vector<int> free = model.free_controls();

  std::vector<LayerResult> results(kNumDerivativeLayers);
  for (int i = 0; i < kNumDerivativeLayers; ++i) {
    results[i].layer = static_cast<DerivativeLayer>(i);
    results[i].tolerance =
        is_local_layer(results[i].layer) ? cfg.tol_local : cfg.tol_pipeline;
  }
  auto& r_block = results[0];
  auto& r_grad = results[1];
  auto& r_hess = results[2];
  auto& r_mixed = results[3];
  auto& r_sens = results[4];
  auto& r_obj = results[5];

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  auto perturbed_controls = [&]() {
    Vector u = asmb.u0;
    for (int k : free) u[k] += cfg.control_noise * uniform(rng);
    return u;
  };

  for (int trial = 0; trial < cfg.local_trials; ++trial) {
    Vector s = asmb.s0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      s[k] += cfg.state_noise * normal(rng);
    }
    const Vector u = perturbed_controls();

    Comparison worst_block;
    std::string where;
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
      const ConstraintBlock& block = model.blocks[b];
      BlockDerivatives bd = block_derivatives(block, s, u, false);
      Matrix jac = bd.jacobian;
      if (b == 0) corrupt_if(cfg, DerivativeLayer::kBlockJacobian, jac);
      const Comparison c =
          compare(jac, fd_block(block, bd.vars, s, u, cfg.h_local));
      if (b == 0 || c.error > worst_block.error) {
        worst_block = c;
        std::ostringstream os;
        os << describe_block(model, static_cast<int>(b)) << ", "
           << entry_text(c);
        where = os.str();
      }
    }
    record(r_block, worst_block, trial, where);

    Matrix g = energy_gradient(model, s, u);
    corrupt_if(cfg, DerivativeLayer::kEnergyGradient, g);
    Comparison c = compare(g, fd_energy_gradient(model, s, u, cfg.h_local));
    record(r_grad, c, trial, entry_text(c));

    Matrix h = energy_hessian(model, s, u, HessianMode::kFull);
    corrupt_if(cfg, DerivativeLayer::kEnergyHessian, h);
    c = compare(h, fd_gradient_wrt(model, s, u, cfg.h_local, false));
    record(r_hess, c, trial, entry_text(c));

    Matrix m = mixed_derivative(model, s, u);
    corrupt_if(cfg, DerivativeLayer::kMixedDerivative, m);
    c = compare(m, fd_gradient_wrt(model, s, u, cfg.h_local, true));
    record(r_mixed, c, trial, entry_text(c));
  }

  FkConfig fk;
  fk.grad_tol = cfg.fk_grad_tol;
  fk.max_iters = 200;
  const int n_u = model.num_controls();
  for (int trial = 0; trial < cfg.pipeline_trials; ++trial) {
    const Vector u = perturbed_controls();
    const Vector s_hat = solve_tight(model, asmb.s0, u, fk);

    Matrix sens = state_sensitivity(model, s_hat, u, fk);
    corrupt_if(cfg, DerivativeLayer::kStateSensitivity, sens);

    EETarget target = ee_state(model, s_hat);
    for (int k = 0; k < kTaskDims; ++k) {
      target[k] += cfg.target_noise * normal(rng);
    }
    Matrix grad = objective_gradient(model, s_hat, u, target, cfg.lambda, fk);
    corrupt_if(cfg, DerivativeLayer::kObjectiveGradient, grad);

    Matrix fd_sens(s_hat.size(), n_u);
    Vector fd_grad(n_u);
    for (int k = 0; k < n_u; ++k) {
      Vector up = u, um = u;
      up[k] += cfg.h_pipeline;
      um[k] -= cfg.h_pipeline;
      const Vector sp = solve_tight(model, s_hat, up, fk);
      const Vector sm = solve_tight(model, s_hat, um, fk);
      fd_sens.col(k) = (sp - sm) / (2.0 * cfg.h_pipeline);
      fd_grad[k] = (objective(model, sp, up, target, cfg.lambda) -
                    objective(model, sm, um, target, cfg.lambda)) /
                   (2.0 * cfg.h_pipeline);
    }
    Comparison c = compare(sens, fd_sens);
    record(r_sens, c, trial, entry_text(c));
    c = compare(grad, fd_grad);
    record(r_obj, c, trial, entry_text(c));
  }

  ValidationReport report;
  for (LayerResult& r : results) {
    r.passed = std::isfinite(r.max_rel_error) && r.max_rel_error <= r.tolerance;
    report.passed = report.passed && r.passed;
  }
  report.layers = std::move(results);
  report.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return report;
}

}  // namespace ccma
