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


#include <gtest/gtest.h>

#include "assembly.hpp"
#include "base_sim.hpp"
#include "error.hpp"
#include "ik_control.hpp"
#include "test_support.hpp"

namespace ccma {
namespace {

using testing::Gen;

// Rolling speed of each wheel from the velocity of its contact point.
Planar contact_point_speeds(const OmniBaseGeometry& g, const Planar& twist) {
  Planar w;
  for (int i = 0; i < 3; ++i) {
    const double phi = g.mount_angles[i];
    const Vec3 p(g.mount_radius * std::cos(phi), g.mount_radius * std::sin(phi), 0);
    const Vec3 v = Vec3(twist.x(), twist.y(), 0) + Vec3(0, 0, twist.z()).cross(p);
    const Vec3 rolling(-std::sin(phi), std::cos(phi), 0);
    w[i] = v.dot(rolling) / g.wheel_radius;
  }
  return w;
}

TEST(WheelMapTest, MatchesContactPointVelocities) {
  Gen gen(51);
  OmniBaseGeometry g;
  for (int trial = 0; trial < 100; ++trial) {
    const Planar twist(gen.normal(1), gen.normal(1), gen.normal(2));
    EXPECT_LT((wheel_speeds_from_twist(g, twist) - contact_point_speeds(g, twist))
                  .cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WheelMapTest, ZeroTwistAndPureRotation) {
  OmniBaseGeometry g;
  EXPECT_EQ(wheel_speeds_from_twist(g, Planar::Zero()), Planar::Zero());
  const double omega = 0.7;
  const Planar w = wheel_speeds_from_twist(g, Planar(0, 0, omega));
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(w[i], g.mount_radius * omega / g.wheel_radius, 1e-15);
  }
}

TEST(WheelMapTest, RoundTripAndLinearity) {
  Gen gen(52);
  for (int trial = 0; trial < 100; ++trial) {
    OmniBaseGeometry g;
    g.wheel_radius = gen.uniform(0.02, 0.1);
    g.mount_radius = gen.uniform(0.05, 0.3);
    const double offset = gen.uniform(-1, 1);
    g.mount_angles = {offset, offset + 2.0, offset + 4.2};
    const Planar twist(gen.normal(1), gen.normal(1), gen.normal(2));
    EXPECT_LT((twist_from_wheel_speeds(g, wheel_speeds_from_twist(g, twist)) - twist)
                  .cwiseAbs().maxCoeff(), 1e-12);
    const double a = gen.normal(3);
    EXPECT_LT((wheel_speeds_from_twist(g, a * twist) -
               a * wheel_speeds_from_twist(g, twist)).cwiseAbs().maxCoeff(),
              1e-12 * (1 + std::abs(a)));
  }
}

TEST(WheelMapTest, RejectsDegenerateGeometry) {
  OmniBaseGeometry g;
  g.wheel_radius = 0.0;
  EXPECT_THROW(g.validate(), Error);
  g = OmniBaseGeometry{};
  g.mount_angles = {0.0, 0.0, 1.0};
  EXPECT_THROW(g.validate(), Error);
}

TEST(PiTrackTest, ZeroErrorGivesZeroTwist) {
  PiState st;
  const Planar pose(0.3, -0.2, 0.4);
  EXPECT_EQ(pi_track(pose, pose, PiGains{}, 0.01, st), Planar::Zero());
}

TEST(PiTrackTest, ProportionalOnlyInBodyFrame) {
  PiGains gains;
  gains.ki.setZero();
  PiState st;
  // Heading +90 degrees: a world +x error is a body -y error.
  const Planar twist =
      pi_track(Planar(0, 0, M_PI / 2), Planar(0.1, 0, M_PI / 2), gains, 0.01, st);
  EXPECT_NEAR(twist.x(), 0.0, 1e-15);
  EXPECT_NEAR(twist.y(), -gains.kp.y() * 0.1, 1e-15);
  EXPECT_NEAR(twist.z(), 0.0, 1e-15);
}

TEST(PiTrackTest, IntegratorIsClamped) {
  PiGains gains;
  gains.integrator_clamp = 0.05;
  PiState st;
  for (int i = 0; i < 1000; ++i) {
    pi_track(Planar::Zero(), Planar(10, -10, 0), gains, 0.01, st);
  }
  EXPECT_NEAR(st.integral.x(), 0.05, 1e-15);
  EXPECT_NEAR(st.integral.y(), -0.05, 1e-15);
}

TEST(PiTrackTest, StepSetpointSettlesWithinTwoSeconds) {
  const OmniBaseGeometry g;
  const PiGains gains;
  const double dt = 0.01;
  Planar pose = Planar::Zero();
  PiState st;
  const Planar set(0.1, 0.0, 0.0);
  for (int tick = 0; tick < 200; ++tick) {
    const Planar cmd = pi_track(pose, set, gains, dt, st);
    const Planar twist =
        twist_from_wheel_speeds(g, wheel_speeds_from_twist(g, cmd));
    const double c = std::cos(pose.z()), s = std::sin(pose.z());
    pose.x() += (c * twist.x() - s * twist.y()) * dt;
    pose.y() += (s * twist.x() + c * twist.y()) * dt;
    pose.z() += twist.z() * dt;
  }
  EXPECT_LT((pose - set).head<2>().norm(), 1e-4);
}

class ExecutionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model_ = build_canonical("ccma-4dof-reduced");
    asm_ = initial_assembly(model_);
    const Vector6 x0 = ee_state(model_, asm_.s0);
    Vector6 a = x0, b = x0;
    a[1] += 0.03;
    b[3] += 0.02;
    track_ = track_waypoints(model_, asm_.s0, asm_.u0, {a, b}, IkConfig{});
    ASSERT_EQ(track_.failures, 0);
  }
  SceneModel model_;
  Assembly asm_;
  TrackReport track_;
};

TEST_F(ExecutionTest, NoiseFreeExecutionFollowsPlan) {
  const ExecutionReport rep =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, ExecutionConfig{});
  EXPECT_EQ(rep.fk_failures, 0);
  EXPECT_EQ(rep.ee_samples.size(), track_.steps.size());
  EXPECT_LT(rep.ee_rmse, 1e-4);
  // Base paths converge to the commanded controls at the end of every hold.
  const size_t nm = static_cast<size_t>(model_.num_bases());
  const auto& trace = rep.base_trace;
  for (size_t i = 0; i < trace.size(); ++i) {
    const bool end_of_hold = i + nm >= trace.size() || trace[i + nm].step != trace[i].step;
    if (end_of_hold) {
      EXPECT_LT((trace[i].pose - trace[i].set).head<2>().norm(), 1e-4);
    }
  }
}

TEST_F(ExecutionTest, DeterministicGivenSeed) {
  ExecutionConfig cfg;
  cfg.noise_sigma = 0.005;
  cfg.seed = 99;
  const ExecutionReport a =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg);
  const ExecutionReport b =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg);
  EXPECT_EQ(a.ee_rmse, b.ee_rmse);
  ASSERT_EQ(a.base_trace.size(), b.base_trace.size());
  for (size_t i = 0; i < a.base_trace.size(); ++i) {
    EXPECT_EQ(a.base_trace[i].pose, b.base_trace[i].pose);
  }
  cfg.seed = 100;
  EXPECT_NE(simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg).ee_rmse,
            a.ee_rmse);
}

TEST_F(ExecutionTest, NoiseRaisesEndEffectorError) {
  ExecutionConfig cfg;
  const double clean =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg).ee_rmse;
  cfg.noise_sigma = 0.005;
  const double noisy =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg).ee_rmse;
  EXPECT_GT(noisy, 100 * clean);
  EXPECT_GT(noisy, 1e-3);
}

TEST_F(ExecutionTest, ZeroGainsLeaveBasesParked) {
  ExecutionConfig cfg;
  cfg.gains.kp.setZero();
  cfg.gains.ki.setZero();
  const ExecutionReport rep =
      simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg);
  for (const BaseSample& b : rep.base_trace) {
    EXPECT_EQ(b.pose, asm_.u0.segment<3>(3 * b.base));
    EXPECT_EQ(b.wheel_speeds, Planar::Zero());
  }
  // The end effector stays put; its error is the commanded displacement.
  const Vector6 x0 = ee_state(model_, asm_.s0);
  for (const EeSample& e : rep.ee_samples) {
    EXPECT_NEAR(e.position_error, (e.planned - x0).head<3>().norm(), 1e-9);
  }
}

TEST_F(ExecutionTest, RejectsBadConfig) {
  ExecutionConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg), Error);
  cfg = ExecutionConfig{};
  cfg.noise_sigma = -1.0;
  EXPECT_THROW(simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg), Error);
  cfg = ExecutionConfig{};
  cfg.gains.kp[0] = -1.0;
  EXPECT_THROW(simulate_execution(model_, asm_.s0, asm_.u0, track_.steps, cfg), Error);
}

}  // namespace
}  // namespace ccma
