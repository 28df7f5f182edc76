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

#ifndef CCMA_CONSTRAINTS_HPP_
#define CCMA_CONSTRAINTS_HPP_

#include <vector>

#include <Eigen/Core>

#include "model.hpp"
#include "rigidbody.hpp"

namespace ccma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// Per-kind constraint values. Each one is the plain formula; the derivative
// path in block_derivatives() is computed independently.
Vector6 eval_revolute(const RigidBodyState& state_i,
                      const RigidBodyState& state_j, const Vec3& p_i,
                      const Vec3& p_j, const Vec3& v_i, const Vec3& v_j);
Vec3 eval_spherical(const RigidBodyState& state_i,
                    const RigidBodyState& state_j, const Vec3& p_i,
                    const Vec3& p_j);
Eigen::Matrix<double, 9, 1> eval_fixed(
    const RigidBodyState& state_i, const RigidBodyState& state_j,
    const Vec3& p_i, const Vec3& p_j, const Vec3& a_i, const Vec3& a_j,
    const Vec3& b_i, const Vec3& b_j);
Eigen::Vector4d eval_universal(const RigidBodyState& state_i,
                               const RigidBodyState& state_j, const Vec3& p_i,
                               const Vec3& p_j, const Vec3& a_i,
                               const Vec3& b_j);
Eigen::Matrix<double, 8, 1> eval_prismatic(
    const RigidBodyState& state_i, const RigidBodyState& state_j,
    const Vec3& p_i, const Vec3& p_j, const Vec3& a_i, const Vec3& a_j,
    const Vec3& b_i, const Vec3& b_j);
Eigen::Vector4d eval_planar_base(const RigidBodyState& state,
                                 const Vec3& normal_local = Vec3::UnitZ());
Eigen::Vector2d eval_motor_xy(const RigidBodyState& state, double u_x,
                              double u_y);
Vec3 eval_motor_z(const RigidBodyState& state, double theta,
                  const Vec3& vp_local = Vec3::UnitX());

// Body state i of the stacked system state.
RigidBodyState body_state(const Vector& s, int body);

// Throws DimensionMismatch naming the first block that cannot be evaluated.
void check_dimensions(const SceneModel& model, const Vector& s,
                      const Vector& u);

Vector eval_block(const ConstraintBlock& block, const Vector& s,
                  const Vector& u);

// C(s, u): every block in row_offset order.
Vector assemble_C(const SceneModel& model, const Vector& s, const Vector& u);

// A variable a block depends on: a state coordinate or a control slot.
struct VarRef {
  enum class Space { kState, kControl };
  Space space;
  int index;
};

// Analytic derivatives of one block in its local variables.
struct BlockDerivatives {
  std::vector<VarRef> vars;
  Vector value;
  Matrix jacobian;            // rows x vars
  std::vector<Matrix> hessian;  // one vars x vars matrix per row
};

std::vector<VarRef> block_variables(const ConstraintBlock& block);
BlockDerivatives block_derivatives(const ConstraintBlock& block,
                                   const Vector& s, const Vector& u,
                                   bool second_order);

Matrix jacobian_s(const SceneModel& model, const Vector& s, const Vector& u);
Matrix jacobian_u(const SceneModel& model, const Vector& s, const Vector& u);
std::vector<BlockDerivatives> block_second_derivs(const SceneModel& model,
                                                  const Vector& s,
                                                  const Vector& u);

// Everything the energy derivatives need, gathered in one pass.
struct Linearization {
  Vector c;
  Matrix jac_s;
  Matrix jac_u;
  // sum_r C_r * d2C_r/ds2 and sum_r C_r * d2C_r/(ds du); only filled when
  // requested.
  Matrix curvature_ss;
  Matrix curvature_su;
};

Linearization linearize(const SceneModel& model, const Vector& s,
                        const Vector& u, bool with_curvature);

}  // namespace ccma

#endif  // CCMA_CONSTRAINTS_HPP_
