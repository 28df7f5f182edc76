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

#ifndef CCMA_MODEL_HPP_
#define CCMA_MODEL_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rigidbody.hpp"

namespace ccma {

enum class ConstraintKind {
  kRevolute,
  kSpherical,
  kFixed,
  kUniversal,
  kPrismatic,
  kPlanarBase,
  kMotorXY,
  kMotorZ,
};

// Scalar rows contributed to C by one block of the given kind.
int row_count(ConstraintKind kind);
const char* kind_name(ConstraintKind kind);
std::optional<ConstraintKind> parse_joint_kind(std::string_view name);
// Passive joints are listed in scene files; base blocks are generated.
bool is_joint_kind(ConstraintKind kind);

inline constexpr int kNoBody = -1;

// One kinematic constraint. Anchors and axes are expressed in the local frame
// of the body they belong to (suffix _i or _j).
//
//   Revolute   [p_j - p_i ; v_j - v_i]                          (axis)
//   Spherical  p_j - p_i
//   Fixed      [p_j - p_i ; a_j - a_i ; b_j - b_i]               (axis, axis2)
//   Universal  [p_j - p_i ; a_i . b_j]                           (axis_i, axis_j)
//   Prismatic  [a_j - a_i ; b_j - b_i ; d . b_i ; d . (a x b)_i]  d = p_j - p_i
//   PlanarBase [z ; n - z_g]                                     (axis_i = n)
//   MotorXY    [x - u[s0] ; y - u[s1]]
//   MotorZ     R * Rz(u[s0]) * vp - x_g                          (axis_i = vp)
struct ConstraintBlock {
  ConstraintKind kind = ConstraintKind::kSpherical;
  int body_i = kNoBody;
  int body_j = kNoBody;
  Vec3 point_i = Vec3::Zero();
  Vec3 point_j = Vec3::Zero();
  Vec3 axis_i = Vec3::UnitZ();
  Vec3 axis_j = Vec3::UnitZ();
  Vec3 axis2_i = Vec3::UnitX();
  Vec3 axis2_j = Vec3::UnitX();
  std::vector<int> control_slots;
  int row_offset = 0;

  int rows() const { return row_count(kind); }
};

enum class ActuationScheme { kReduced, kComplete };

struct Body {
  std::string name;
  RigidBodyState initial;
};

struct MobileBase {
  int body = kNoBody;
  ActuationScheme scheme = ActuationScheme::kComplete;
  // Commanded (x, y, theta) at load time; theta stays frozen for kReduced.
  std::array<double, 3> initial = {0.0, 0.0, 0.0};
};

// Task coordinates of the end-effector, in X_EE order (x, y, z, gamma, beta,
// alpha).
inline constexpr int kTaskDims = 6;
using TaskMask = std::array<bool, kTaskDims>;

struct EndEffector {
  int body = kNoBody;
  TaskMask mask = {true, true, true, true, true, true};
};

struct SceneModel {
  std::string name;
  std::string description;
  std::vector<Body> bodies;
  std::vector<ConstraintBlock> joints;
  std::vector<MobileBase> bases;
  EndEffector end_effector;

  // Derived by build_blocks(): the joints followed by PlanarBase, MotorXY and
  // MotorZ for every base, with row offsets assigned.
  std::vector<ConstraintBlock> blocks;
  int num_rows = 0;

  int num_bodies() const { return static_cast<int>(bodies.size()); }
  int num_bases() const { return static_cast<int>(bases.size()); }
  int num_states() const { return kBodyDofs * num_bodies(); }
  int num_controls() const { return 3 * num_bases(); }
  // Indices into u that the inverse kinematics may change.
  std::vector<int> free_controls() const;
  int num_free_controls() const {
    return static_cast<int>(free_controls().size());
  }
  int find_body(std::string_view name) const;
};

// Rebuilds model.blocks and model.num_rows from joints and bases.
void build_blocks(SceneModel& model);

// Human-readable identification of a block for diagnostics.
std::string describe_block(const SceneModel& model, int block_index);

}  // namespace ccma

#endif  // CCMA_MODEL_HPP_
