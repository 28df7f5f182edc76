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

#include "rigidbody.hpp"
#include "test_support.hpp"

namespace ccma {
namespace {

using testing::Gen;

Mat3 axis_angle_zyx(double g, double b, double a) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(g, Vec3::UnitZ()) * AngleAxisd(b, Vec3::UnitY()) *
          AngleAxisd(a, Vec3::UnitX()))
      .toRotationMatrix();
}

TEST(RotationTest, MatchesAxisAngleComposition) {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const RigidBodyState st = gen.body_state();
    const Mat3 R = rotation_matrix(st);
    EXPECT_LT((R - axis_angle_zyx(st.gamma, st.beta, st.alpha)).norm(), 1e-14);
  }
}

TEST(RotationTest, IsProperOrthogonal) {
  Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 R = rotation_matrix(gen.body_state());
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
  }
}

TEST(RotationTest, ZeroAnglesGiveIdentity) {
  EXPECT_EQ(rotation_matrix(0.0, 0.0, 0.0), Mat3::Identity());
}

TEST(RotationTest, RotZQuarterTurn) {
  const Vec3 v = rot_z(M_PI / 2) * Vec3::UnitX();
  EXPECT_NEAR(v.x(), 0.0, 1e-15);
  EXPECT_NEAR(v.y(), 1.0, 1e-15);
}

TEST(RotationTest, DerivativesMatchFiniteDifferences) {
  Gen gen(13);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const RigidBodyState st = gen.body_state();
    const RotationDerivatives d = rotation_derivatives(st);
    EXPECT_LT((d.value - rotation_matrix(st)).norm(), 1e-15);
    auto shifted = [&](int k, double dk) {
      std::array<double, 3> ang = {st.gamma, st.beta, st.alpha};
      ang[k] += dk;
      return rotation_matrix(ang[0], ang[1], ang[2]);
    };
    for (int a = 0; a < 3; ++a) {
      const Mat3 fd = (shifted(a, h) - shifted(a, -h)) / (2 * h);
      EXPECT_LT((d.first[a] - fd).cwiseAbs().maxCoeff(), 1e-9) << "angle " << a;
      for (int b = 0; b < 3; ++b) {
        auto first = [&](double db) {
          RigidBodyState moved = st;
          double* ang[3] = {&moved.gamma, &moved.beta, &moved.alpha};
          *ang[b] += db;
          return rotation_derivatives(moved).first[a];
        };
        const Mat3 fd2 = (first(h) - first(-h)) / (2 * h);
        EXPECT_LT((d.d2(a, b) - fd2).cwiseAbs().maxCoeff(), 1e-9)
            << "angles " << a << ", " << b;
      }
    }
  }
}

TEST(RotationTest, PackedIndexIsSymmetricAndDense) {
  std::array<int, 6> seen{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const int k = RotationDerivatives::packed_index(a, b);
      EXPECT_EQ(k, RotationDerivatives::packed_index(b, a));
      ASSERT_GE(k, 0);
      ASSERT_LT(k, 6);
      if (a <= b) ++seen[k];
    }
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(TransformTest, PointAndVectorTransforms) {
  Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidBodyState st = gen.body_state();
    const Vec3 p = gen.vector(3, 1.0);
    const Mat3 R = axis_angle_zyx(st.gamma, st.beta, st.alpha);
    EXPECT_LT((transform_point(st, p) - (R * p + st.t)).norm(), 1e-14);
    EXPECT_LT((transform_vector(st, p) - R * p).norm(), 1e-14);
    // Distances between points are preserved.
    const Vec3 q = gen.vector(3, 1.0);
    EXPECT_NEAR((transform_point(st, p) - transform_point(st, q)).norm(),
                (p - q).norm(), 1e-13);
  }
}

TEST(TransformTest, CoordinateRoundTrip) {
  Gen gen(15);
  const RigidBodyState st = gen.body_state();
  const auto c = st.coords();
  const RigidBodyState back = RigidBodyState::from_coords(c);
  EXPECT_EQ(back.gamma, st.gamma);
  EXPECT_EQ(back.beta, st.beta);
  EXPECT_EQ(back.alpha, st.alpha);
  EXPECT_EQ(back.t, st.t);
}

}  // namespace
}  // namespace ccma
