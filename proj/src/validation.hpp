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


#ifndef CCMA_VALIDATION_HPP_
#define CCMA_VALIDATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forward_solver.hpp"
#include "model.hpp"

namespace ccma {

enum class DerivativeLayer {
  kBlockJacobian,
  kEnergyGradient,
  kEnergyHessian,
  kMixedDerivative,
  kStateSensitivity,
  kObjectiveGradient,
};
inline constexpr int kNumDerivativeLayers = 6;

const char* layer_name(DerivativeLayer layer);
std::optional<DerivativeLayer> parse_layer(const std::string& name);

// Layers checked against central differences of an independently computed
// quantity (constraint values, energy, analytic gradient) at random states.
bool is_local_layer(DerivativeLayer layer);

struct ValidationConfig {
  int local_trials = 50;
  int pipeline_trials = 20;
  double h_local = 1e-5;
  double h_pipeline = 1e-6;
  double tol_local = 1e-6;
  double tol_pipeline = 1e-4;
  std::uint64_t seed = 7;
  double state_noise = 0.05;    // std. dev. added to s0 for local layers
  double control_noise = 0.02;  // uniform half-width on free controls
  double target_noise = 0.005;  // std. dev. of the target offset (m, rad)
  double lambda = 0.1;
  // Forward solves of the pipeline layers run to this gradient tolerance.
  double fk_grad_tol = 1e-13;
  // Test hook: perturb the analytic result of this layer.
  std::optional<DerivativeLayer> corrupt;

  void validate() const;
};

struct LayerResult {
  DerivativeLayer layer = DerivativeLayer::kBlockJacobian;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  int worst_trial = -1;
  std::string worst_entry;  // e.g. "block 3 (revolute ...), row 2, var 5"
  int trials = 0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<LayerResult> layers;
  bool passed = true;
  double wall_time = 0.0;
};

// Normwise relative error max|a - b| / max|b| (max|a - b| when b vanishes).
double relative_error(const Matrix& analytic, const Matrix& reference);

// Checks every analytic derivative layer of the scene. Throws
// InfeasibleScene / InvalidArgument like the underlying calls.
ValidationReport validate_gradients(const SceneModel& model,
                                    const ValidationConfig& cfg = {});

}  // namespace ccma

#endif  // CCMA_VALIDATION_HPP_
