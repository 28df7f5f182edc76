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
#include "error.hpp"
#include "forward_solver.hpp"
#include "ik_control.hpp"
#include "test_support.hpp"

namespace ccma {
namespace {

using testing::Gen;

std::string param_name(const ::testing::TestParamInfo<std::string>& info) {
  std::string n = info.param;
  for (char& c : n) {
    if (c == '-') c = '_';
  }
  return n;
}

Vector6 masked(const TaskMask& mask, Vector6 v) {
  for (int c = 0; c < kTaskDims; ++c) {
    if (!mask[c]) v[c] = 0.0;
  }
  return v;
}

class IkTest : public ::testing::TestWithParam<std::string> {
 protected:
  void SetUp() override {
    model_ = build_canonical(GetParam());
    asm_ = initial_assembly(model_);
    tight_.grad_tol = 1e-13;
  }
  SceneModel model_;
  Assembly asm_;
  FkConfig tight_;
};

TEST_P(IkTest, EndEffectorReadsPlatformCoordinates) {
  const Vector6 x = ee_state(model_, asm_.s0);
  const RigidBodyState p = body_state(asm_.s0, model_.end_effector.body);
  EXPECT_EQ(x[0], p.t.x());
  EXPECT_EQ(x[1], p.t.y());
  EXPECT_EQ(x[2], p.t.z());
  EXPECT_EQ(x[3], p.gamma);
  EXPECT_EQ(x[4], p.beta);
  EXPECT_EQ(x[5], p.alpha);
}

TEST_P(IkTest, ObjectiveGradientMatchesPipelineDifferences) {
  Gen gen(41);
  const IkConfig ik;
  for (int trial = 0; trial < 3; ++trial) {
    const Vector u = testing::perturbed_controls(model_, asm_.u0, gen, 0.02);
    const SolveReport fk = solve_fk(model_, asm_.s0, u, tight_);
    ASSERT_TRUE(fk.converged);
    const EETarget target = ee_state(model_, fk.s_hat) + gen.vector(6, 0.005);
    const Vector g =
        objective_gradient(model_, fk.s_hat, u, target, ik.lambda, tight_);
    const Matrix fd = testing::central_jacobian(
        [&](const Vector& x) {
          const SolveReport r = solve_fk(model_, fk.s_hat, x, tight_);
          return Vector::Constant(
              1, objective(model_, r.s_hat, x, target, ik.lambda));
        },
        u, 1e-6).transpose();
    EXPECT_LT(testing::normwise_error(g, fd), 1e-4);
  }
}

TEST_P(IkTest, TaskJacobianMatchesPipelineDifferences) {
  Gen gen(42);
  const Vector u = testing::perturbed_controls(model_, asm_.u0, gen, 0.02);
  const SolveReport fk = solve_fk(model_, asm_.s0, u, tight_);
  ASSERT_TRUE(fk.converged);
  const Matrix J = task_jacobian(model_, fk.s_hat, u, tight_);
  const TaskMask& mask = model_.end_effector.mask;
  const Matrix fd = testing::central_jacobian(
      [&](const Vector& x) {
        const SolveReport r = solve_fk(model_, fk.s_hat, x, tight_);
        return Vector(masked(mask, ee_state(model_, r.s_hat)));
      },
      u, 1e-6);
  EXPECT_LT(testing::normwise_error(J, fd), 1e-5);
}

TEST_P(IkTest, SolvesCombinedPerturbationStep) {
  Gen gen(43);
  const TaskMask& mask = model_.end_effector.mask;
  const IkConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    Vector6 delta;
    const Vec3 dir = gen.unit_vector();
    delta << 0.01 * dir, Vec3::Constant(0.005).cwiseProduct(
                             Vec3(gen.coin() ? 1 : -1, gen.coin() ? 1 : -1,
                                  gen.coin() ? 1 : -1));
    const EETarget target = ee_state(model_, asm_.s0) + masked(mask, delta);
    const IkResult r = solve_ik_step(model_, asm_.s0, asm_.u0, target, cfg);
    ASSERT_TRUE(r.converged()) << ik_status_name(r.status);
    EXPECT_LT(r.task_error, 1e-6);
    EXPECT_LE(r.energy, cfg.max_residual_energy);
    EXPECT_LT(masked(mask, ee_state(model_, r.s_hat) - target).cwiseAbs().maxCoeff(),
              1e-6);
    // The returned state is the forward solution of the returned controls.
    EXPECT_LT(energy(model_, r.s_hat, r.u), 1e-14);
    // Frozen headings on reduced bases are not optimized.
    for (int k = 0; k < model_.num_bases(); ++k) {
      if (model_.bases[k].scheme == ActuationScheme::kReduced) {
        EXPECT_EQ(r.u[3 * k + 2], asm_.u0[3 * k + 2]);
      }
    }
  }
}

TEST_P(IkTest, TrackRespectsStepLimitsAndTolerance) {
  Gen gen(44);
  const TaskMask& mask = model_.end_effector.mask;
  IkConfig cfg;
  const Vector6 start = ee_state(model_, asm_.s0);
  std::vector<EETarget> targets;
  for (int w = 0; w < 2; ++w) {
    Vector6 d;
    d << gen.vector(3, 0.015), gen.vector(3, 0.03);
    targets.push_back(start + masked(mask, d));
  }
  const TrackReport rep = track_waypoints(model_, asm_.s0, asm_.u0, targets, cfg);
  EXPECT_EQ(rep.failures, 0);
  Vector6 prev = start;
  for (const TrackStep& st : rep.steps) {
    const Vector6 inc = st.commanded - prev;
    EXPECT_LE(inc.head<3>().norm(), cfg.trans_step + 1e-12);
    EXPECT_LE(inc.tail<3>().cwiseAbs().maxCoeff(), cfg.rot_step + 1e-12);
    EXPECT_LT(st.task_error, 1e-6);
    prev = st.commanded;
  }
  // The last sub-step of each waypoint lands on the waypoint itself.
  for (const TrackStep& st : rep.steps) {
    const bool last = &st == &rep.steps.back() ||
                      (&st + 1)->waypoint != st.waypoint;
    if (last) {
      EXPECT_EQ(masked(mask, st.commanded),
                masked(mask, targets[st.waypoint]));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Canonical, IkTest, ::testing::ValuesIn(canonical_names()),
                         param_name);

TEST(SubstepTest, CountIsSmallestCompliantSubdivision) {
  Gen gen(45);
  for (int trial = 0; trial < 2000; ++trial) {
    TaskMask mask;
    for (bool& m : mask) m = gen.coin();
    Vector6 delta;
    for (int c = 0; c < 6; ++c) delta[c] = gen.coin() ? gen.normal(0.05) : 0.0;
    const double ts = gen.uniform(0.001, 0.02), rs = gen.uniform(0.001, 0.02);
    const int n = substep_count(mask, delta, ts, rs);
    ASSERT_GE(n, 1);
    const Vector6 step = masked(mask, delta) / n;
    EXPECT_LE(step.head<3>().norm(), ts * (1 + 1e-9));
    EXPECT_LE(step.tail<3>().cwiseAbs().maxCoeff(), rs * (1 + 1e-9));
    if (n > 1) {
      // One fewer sub-step would break a limit.
      const Vector6 coarse = masked(mask, delta) / (n - 1);
      EXPECT_TRUE(coarse.head<3>().norm() > ts ||
                  coarse.tail<3>().cwiseAbs().maxCoeff() > rs);
    }
  }
}

TEST(SubstepTest, ExactMultiplesDoNotSpill) {
  TaskMask mask{true, true, true, true, false, false};
  Vector6 d = Vector6::Zero();
  d[1] = 0.1;
  EXPECT_EQ(substep_count(mask, d, 0.01, 0.005), 10);
  d.setZero();
  d[3] = 0.4;
  EXPECT_EQ(substep_count(mask, d, 0.01, 0.005), 80);
  d.setZero();
  d[4] = 0.4;  // masked out
  EXPECT_EQ(substep_count(mask, d, 0.01, 0.005), 1);
}

TEST(TrackTest, DirectModeSolvesEachWaypointOnce) {
  const SceneModel m = build_canonical("ccma-4dof-complete");
  const Assembly a = initial_assembly(m);
  IkConfig cfg;
  cfg.direct = true;
  Vector6 t = ee_state(m, a.s0);
  t[0] += 0.02;
  const TrackReport rep = track_waypoints(m, a.s0, a.u0, {t, t}, cfg);
  ASSERT_EQ(rep.steps.size(), 2u);
  EXPECT_EQ(rep.failures, 0);
}

TEST(TrackTest, UnreachableTargetIsReportedNotThrown) {
  const SceneModel m = build_canonical("ccma-4dof-reduced");
  const Assembly a = initial_assembly(m);
  IkConfig cfg;
  cfg.max_outer_iters = 30;
  Vector6 t = ee_state(m, a.s0);
  t[2] += 1.0;  // far above the reachable height
  const IkResult r = solve_ik_step(m, a.s0, a.u0, t, cfg);
  EXPECT_FALSE(r.converged());
  EXPECT_GT(r.task_error, 0.1);
  EXPECT_LT(energy(m, r.s_hat, r.u), 1e-14);
}

TEST(TrackTest, RejectsNonFiniteWaypoint) {
  const SceneModel m = build_canonical("ccma-4dof-reduced");
  const Assembly a = initial_assembly(m);
  Vector6 t = ee_state(m, a.s0);
  t[1] = std::nan("");
  EXPECT_THROW(track_waypoints(m, a.s0, a.u0, {t}, IkConfig{}), Error);
}

TEST(IkConfigTest, LambdaMustLieInUnitInterval) {
  IkConfig cfg;
  for (double bad : {0.0, 1.0, -0.5, 2.0}) {
    cfg.lambda = bad;
    EXPECT_THROW(cfg.validate(), Error) << bad;
  }
  cfg = IkConfig{};
  cfg.trans_step = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(IkConfigTest, ScaledIdentityStartAlsoConverges) {
  const SceneModel m = build_canonical("ccma-6dof-sym");
  const Assembly a = initial_assembly(m);
  IkConfig cfg;
  cfg.bfgs_init = BfgsInit::kScaledIdentity;
  cfg.max_outer_iters = 2000;
  Vector6 t = ee_state(m, a.s0);
  t[0] += 0.005;
  t[5] += 0.002;
  const IkResult r = solve_ik_step(m, a.s0, a.u0, t, cfg);
  EXPECT_TRUE(r.converged()) << ik_status_name(r.status);
}

}  // namespace
}  // namespace ccma
