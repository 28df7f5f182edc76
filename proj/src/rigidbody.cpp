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

#include "rigidbody.hpp"

#include <cmath>

namespace ccma {
namespace {

// Elementary rotations and their first two derivatives.
struct Elementary {
  Mat3 r, d1, d2;
};

Elementary elementary_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Elementary e;
  e.r << c, -s, 0, s, c, 0, 0, 0, 1;
  e.d1 << -s, -c, 0, c, -s, 0, 0, 0, 0;
  e.d2 << -c, s, 0, -s, -c, 0, 0, 0, 0;
  return e;
}

Elementary elementary_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Elementary e;
  e.r << c, 0, s, 0, 1, 0, -s, 0, c;
  e.d1 << -s, 0, c, 0, 0, 0, -c, 0, -s;
  e.d2 << -c, 0, -s, 0, 0, 0, s, 0, -c;
  return e;
}

Elementary elementary_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Elementary e;
  e.r << 1, 0, 0, 0, c, -s, 0, s, c;
  e.d1 << 0, 0, 0, 0, -s, -c, 0, c, -s;
  e.d2 << 0, 0, 0, 0, -c, s, 0, -s, -c;
  return e;
}

}  // namespace

Mat3 rot_z(double angle) { return elementary_z(angle).r; }

Mat3 rotation_matrix(double gamma, double beta, double alpha) {
  return elementary_z(gamma).r * elementary_y(beta).r * elementary_x(alpha).r;
}

Mat3 rotation_matrix(const RigidBodyState& state) {
  return rotation_matrix(state.gamma, state.beta, state.alpha);
}

Vec3 transform_point(const RigidBodyState& state, const Vec3& p_local) {
  return rotation_matrix(state) * p_local + state.t;
}

Vec3 transform_vector(const RigidBodyState& state, const Vec3& v_local) {
  return rotation_matrix(state) * v_local;
}

RotationDerivatives rotation_derivatives(const RigidBodyState& state) {
  const Elementary z = elementary_z(state.gamma);
  const Elementary y = elementary_y(state.beta);
  const Elementary x = elementary_x(state.alpha);

  // factor[k][n]: n-th derivative of the k-th elementary factor.
  const std::array<std::array<const Mat3*, 3>, 3> factor = {{
      {&z.r, &z.d1, &z.d2},
      {&y.r, &y.d1, &y.d2},
      {&x.r, &x.d1, &x.d2},
  }};
  auto product = [&](int order_z, int order_y, int order_x) -> Mat3 {
    return *factor[0][order_z] * *factor[1][order_y] * *factor[2][order_x];
  };

  RotationDerivatives d;
  d.value = product(0, 0, 0);
  d.first[0] = product(1, 0, 0);
  d.first[1] = product(0, 1, 0);
  d.first[2] = product(0, 0, 1);
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      int order[3] = {0, 0, 0};
      ++order[a];
      ++order[b];
      d.second[RotationDerivatives::packed_index(a, b)] =
          product(order[0], order[1], order[2]);
    }
  }
  return d;
}

}  // namespace ccma
