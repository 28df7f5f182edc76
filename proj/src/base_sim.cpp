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


#include "base_sim.hpp"

#include <cmath>
#include <random>

#include "error.hpp"

namespace ccma {
namespace {

Eigen::Matrix2d planar_rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return (Eigen::Matrix2d() << c, -s, s, c).finished();
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * 3.14159265358979323846); }

Planar slot(const Vector& u, int base) { return u.segment<3>(3 * base); }

}  // namespace

void OmniBaseGeometry::validate() const {
  if (!(wheel_radius > 0.0) || !(mount_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "wheel radius and mount radius must be positive");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(wrap_angle(mount_angles[i] - mount_angles[j])) < 1e-9) {
        throw Error(ErrorCode::kInvalidArgument, "wheel mount angles must differ");
      }
    }
  }
  if (std::abs(wheel_matrix(*this).determinant()) < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "wheel layout is not holonomic");
  }
}

void PiGains::validate() const {
  if ((kp.array() < 0.0).any() || (ki.array() < 0.0).any() ||
      !(integrator_clamp >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "PI gains and integrator clamp must be non-negative");
  }
}

void ExecutionConfig::validate() const {
  geometry.validate();
  gains.validate();
  if (!(dt > 0.0) || !(hold >= dt) || !(noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "execution needs dt > 0, hold >= dt and noise_sigma >= 0");
  }
  fk.validate();
}

Eigen::Matrix3d wheel_matrix(const OmniBaseGeometry& g) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    m.row(i) << -std::sin(g.mount_angles[i]), std::cos(g.mount_angles[i]),
        g.mount_radius;
  }
  return m;
}

Planar wheel_speeds_from_twist(const OmniBaseGeometry& geometry,
                               const Planar& body_twist) {
  return wheel_matrix(geometry) * body_twist / geometry.wheel_radius;
}

Planar twist_from_wheel_speeds(const OmniBaseGeometry& geometry,
                               const Planar& wheel_speeds) {
  return wheel_matrix(geometry).colPivHouseholderQr().solve(
      geometry.wheel_radius * wheel_speeds);
}

Planar pi_track(const Planar& current, const Planar& set, const PiGains& gains,
                double dt, PiState& state) {
  Planar e;
  e.head<2>() = planar_rotation(current.z()).transpose() *
                (set.head<2>() - current.head<2>());
  e.z() = wrap_angle(set.z() - current.z());
  state.integral = (state.integral + e * dt)
                       .cwiseMax(-gains.integrator_clamp)
                       .cwiseMin(gains.integrator_clamp);
  return gains.kp.cwiseProduct(e) + gains.ki.cwiseProduct(state.integral);
}

ExecutionReport simulate_execution(const SceneModel& model, const Vector& s0,
                                   const Vector& u0,
                                   const std::vector<TrackStep>& steps,
                                   const ExecutionConfig& cfg) {
  cfg.validate();
  const int nm = model.num_bases();
  if (u0.size() != model.num_controls()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial controls do not match the scene");
  }
  for (const TrackStep& st : steps) {
    if (st.u.size() != model.num_controls()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "track controls do not match the scene");
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Planar> pose(nm);
  std::vector<PiState> pi(nm);
  for (int k = 0; k < nm; ++k) pose[k] = slot(u0, k);

  const int ticks = static_cast<int>(std::lround(cfg.hold / cfg.dt));
  ExecutionReport report;
  Vector s = s0;
  double time = 0.0;
  double sq_pos = 0.0, sq_yaw = 0.0;
  int samples = 0;

  for (size_t i = 0; i < steps.size(); ++i) {
    const TrackStep& st = steps[i];
    for (int tick = 0; tick < ticks; ++tick) {
      time += cfg.dt;
      for (int k = 0; k < nm; ++k) {
        const Planar set = slot(st.u, k);
        const Planar cmd = pi_track(pose[k], set, cfg.gains, cfg.dt, pi[k]);
        const Planar speeds = wheel_speeds_from_twist(cfg.geometry, cmd);
        const Planar twist = twist_from_wheel_speeds(cfg.geometry, speeds);
        pose[k].head<2>() += planar_rotation(pose[k].z()) * twist.head<2>() * cfg.dt;
        pose[k].z() += twist.z() * cfg.dt;
        if (cfg.noise_sigma > 0.0) {
          pose[k].x() += cfg.noise_sigma * noise(rng);
          pose[k].y() += cfg.noise_sigma * noise(rng);
        }
        report.base_trace.push_back(
            {static_cast<int>(i), time, k, set, pose[k], speeds});
      }
    }

    Vector u_sim(model.num_controls());
    for (int k = 0; k < nm; ++k) u_sim.segment<3>(3 * k) = pose[k];
    const SolveReport fk = solve_fk(model, s, u_sim, cfg.fk);
    EeSample sample;
    sample.step = static_cast<int>(i);
    sample.time = time;
    sample.planned = st.achieved;
    sample.energy = fk.energy;
    sample.converged = fk.converged;
    if (fk.converged) {
      s = fk.s_hat;
      sample.executed = ee_state(model, s);
      const Vector6 diff = sample.executed - sample.planned;
      sample.position_error = diff.head<3>().norm();
      sq_pos += diff.head<3>().squaredNorm();
      sq_yaw += diff[3] * diff[3];
      ++samples;
    } else {
      sample.executed = ee_state(model, fk.s_hat);
      sample.position_error = (sample.executed - sample.planned).head<3>().norm();
      ++report.fk_failures;
    }
    report.ee_samples.push_back(sample);
  }
  if (samples > 0) {
    report.ee_rmse = std::sqrt(sq_pos / samples);
    report.ee_rmse_yaw = std::sqrt(sq_yaw / samples);
  }
  return report;
}

}  // namespace ccma
