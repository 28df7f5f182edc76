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

#ifndef CCMA_RIGIDBODY_HPP_
#define CCMA_RIGIDBODY_HPP_

#include <array>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ccma {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Number of state coordinates per rigid body: (gamma, beta, alpha, x, y, z).
inline constexpr int kBodyDofs = 6;

// Pose of one rigid body. The orientation is R = Rz(gamma) * Ry(beta) *
// Rx(alpha), i.e. extrinsic rotations about the world x, y and z axes applied
// in that order. Angles are unconstrained coordinates and never wrapped.
struct RigidBodyState {
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  Vec3 t = Vec3::Zero();

  static RigidBodyState from_coords(std::span<const double, kBodyDofs> c) {
    return {c[0], c[1], c[2], Vec3(c[3], c[4], c[5])};
  }
  std::array<double, kBodyDofs> coords() const {
    return {gamma, beta, alpha, t.x(), t.y(), t.z()};
  }
};

Mat3 rotation_matrix(double gamma, double beta, double alpha);
Mat3 rotation_matrix(const RigidBodyState& state);

// Elementary rotation about the world z axis.
Mat3 rot_z(double angle);

Vec3 transform_point(const RigidBodyState& state, const Vec3& p_local);
Vec3 transform_vector(const RigidBodyState& state, const Vec3& v_local);

// R and its derivatives with respect to the angle coordinates, indexed
// 0 = gamma, 1 = beta, 2 = alpha.
struct RotationDerivatives {
  Mat3 value;
  std::array<Mat3, 3> first;
  // Upper triangle of the symmetric second-derivative table, packed as
  // (gg, gb, ga, bb, ba, aa).
  std::array<Mat3, 6> second;

  const Mat3& d2(int a, int b) const { return second[packed_index(a, b)]; }

  static constexpr int packed_index(int a, int b) {
    if (a > b) {
      const int tmp = a;
      a = b;
      b = tmp;
    }
    constexpr int kRowStart[3] = {0, 3, 5};
    return kRowStart[a] + (b - a);
  }
};

RotationDerivatives rotation_derivatives(const RigidBodyState& state);

}  // namespace ccma

#endif  // CCMA_RIGIDBODY_HPP_
