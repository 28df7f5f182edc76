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

#include "model.hpp"

#include <sstream>

namespace ccma {

int row_count(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kRevolute: return 6;
    case ConstraintKind::kSpherical: return 3;
    case ConstraintKind::kFixed: return 9;
    case ConstraintKind::kUniversal: return 4;
    case ConstraintKind::kPrismatic: return 8;
    case ConstraintKind::kPlanarBase: return 4;
    case ConstraintKind::kMotorXY: return 2;
    case ConstraintKind::kMotorZ: return 3;
  }
  return 0;
}

const char* kind_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kRevolute: return "revolute";
    case ConstraintKind::kSpherical: return "spherical";
    case ConstraintKind::kFixed: return "fixed";
    case ConstraintKind::kUniversal: return "universal";
    case ConstraintKind::kPrismatic: return "prismatic";
    case ConstraintKind::kPlanarBase: return "planar_base";
    case ConstraintKind::kMotorXY: return "motor_xy";
    case ConstraintKind::kMotorZ: return "motor_z";
  }
  return "?";
}

std::optional<ConstraintKind> parse_joint_kind(std::string_view name) {
  for (ConstraintKind k :
       {ConstraintKind::kRevolute, ConstraintKind::kSpherical,
        ConstraintKind::kFixed, ConstraintKind::kUniversal,
        ConstraintKind::kPrismatic}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

bool is_joint_kind(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kPlanarBase:
    case ConstraintKind::kMotorXY:
    case ConstraintKind::kMotorZ:
      return false;
    default:
      return true;
  }
}

std::vector<int> SceneModel::free_controls() const {
  std::vector<int> free;
  for (int k = 0; k < num_bases(); ++k) {
    free.push_back(3 * k);
    free.push_back(3 * k + 1);
    if (bases[k].scheme == ActuationScheme::kComplete) free.push_back(3 * k + 2);
  }
  return free;
}

int SceneModel::find_body(std::string_view name) const {
  for (int i = 0; i < num_bodies(); ++i) {
    if (bodies[i].name == name) return i;
  }
  return kNoBody;
}

void build_blocks(SceneModel& model) {
  model.blocks.clear();
  model.blocks.reserve(model.joints.size() + 3 * model.bases.size());
  for (const ConstraintBlock& joint : model.joints) model.blocks.push_back(joint);
  for (int k = 0; k < model.num_bases(); ++k) {
    const int body = model.bases[k].body;

    ConstraintBlock planar;
    planar.kind = ConstraintKind::kPlanarBase;
    planar.body_i = body;
    planar.axis_i = Vec3::UnitZ();
    model.blocks.push_back(planar);

    ConstraintBlock motor_xy;
    motor_xy.kind = ConstraintKind::kMotorXY;
    motor_xy.body_i = body;
    motor_xy.control_slots = {3 * k, 3 * k + 1};
    model.blocks.push_back(motor_xy);

    ConstraintBlock motor_z;
    motor_z.kind = ConstraintKind::kMotorZ;
    motor_z.body_i = body;
    motor_z.axis_i = Vec3::UnitX();
    motor_z.control_slots = {3 * k + 2};
    model.blocks.push_back(motor_z);
  }
  int offset = 0;
  for (ConstraintBlock& block : model.blocks) {
    block.row_offset = offset;
    offset += block.rows();
  }
  model.num_rows = offset;
}

std::string describe_block(const SceneModel& model, int block_index) {
  const ConstraintBlock& block = model.blocks.at(block_index);
  auto body_name = [&](int b) -> std::string {
    if (b >= 0 && b < model.num_bodies()) return "'" + model.bodies[b].name + "'";
    return "#" + std::to_string(b);
  };
  std::ostringstream os;
  os << "block " << block_index << " (" << kind_name(block.kind) << " on "
     << body_name(block.body_i);
  if (block.body_j != kNoBody) os << "-" << body_name(block.body_j);
  os << ")";
  return os.str();
}

}  // namespace ccma
