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


#ifndef CCMA_BASE_SIM_HPP_
#define CCMA_BASE_SIM_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "forward_solver.hpp"
#include "ik_control.hpp"
#include "model.hpp"

namespace ccma {

// Planar pose or twist (x, y, theta).
using Planar = Eigen::Vector3d;

// Three swedish-90 wheels on a circle of radius mount_radius; wheel i drives
// along the tangent at mount angle theta_i.
struct OmniBaseGeometry {
  double wheel_radius = 0.05;  // m
  double mount_radius = 0.15;  // m
  std::array<double, 3> mount_angles = {0.0, 2.0943951023931953,
                                        4.1887902047863905};

  // Throws InvalidArgument.
  void validate() const;
};

struct PiGains {
  // Per coordinate (x, y, yaw). kp = 10, ki = 25 places both closed-loop
  // poles at -5 rad/s.
  Planar kp = Planar::Constant(10.0);
  Planar ki = Planar::Constant(25.0);
  double integrator_clamp = 0.5;  // bound on each integrated error

  void validate() const;
};

struct PiState {
  Planar integral = Planar::Zero();
};

// phi_dot = (1 / r) M (vx, vy, omega), row i = (-sin th_i, cos th_i, L).
Eigen::Matrix3d wheel_matrix(const OmniBaseGeometry& geometry);
Planar wheel_speeds_from_twist(const OmniBaseGeometry& geometry,
                               const Planar& body_twist);
Planar twist_from_wheel_speeds(const OmniBaseGeometry& geometry,
                               const Planar& wheel_speeds);

// Body-frame twist command from the world-frame pose error; the integrator in
// `state` advances by dt.
Planar pi_track(const Planar& current, const Planar& set, const PiGains& gains,
                double dt, PiState& state);

struct ExecutionConfig {
  OmniBaseGeometry geometry;
  PiGains gains;
  double dt = 0.01;    // s
  double hold = 2.0;   // s of control per track sub-step
  // Standard deviation of the additive noise on each base x and y per
  // timestep (m); 0 disables the disturbance.
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  FkConfig fk;

  void validate() const;
};

struct BaseSample {
  int step = 0;  // track sub-step being executed
  double time = 0.0;
  int base = 0;
  Planar set = Planar::Zero();
  Planar pose = Planar::Zero();
  Planar wheel_speeds = Planar::Zero();
};

struct EeSample {
  int step = 0;
  double time = 0.0;
  Vector6 planned = Vector6::Zero();   // X_EE of the track solution
  Vector6 executed = Vector6::Zero();  // X_EE with the simulated base poses
  double position_error = 0.0;        // |executed - planned| over x, y, z
  double energy = 0.0;
  bool converged = false;
};

struct ExecutionReport {
  std::vector<BaseSample> base_trace;
  std::vector<EeSample> ee_samples;
  double ee_rmse = 0.0;       // position-norm RMSE over converged samples, m
  double ee_rmse_yaw = 0.0;   // rad
  int fk_failures = 0;
};

// Every track sub-step becomes a hold of cfg.hold seconds during which each
// base is driven toward its commanded (x, y, theta) by the PI loop and wheel
// map. At the end of each hold the end-effector is recovered by a forward
// solve with the motor targets set to the simulated base poses, warm-started
// from the previous one.
ExecutionReport simulate_execution(const SceneModel& model, const Vector& s0,
                                   const Vector& u0,
                                   const std::vector<TrackStep>& steps,
                                   const ExecutionConfig& cfg);

}  // namespace ccma

#endif  // CCMA_BASE_SIM_HPP_
