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

#ifndef CCMA_ASSEMBLY_HPP_
#define CCMA_ASSEMBLY_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "constraints.hpp"
#include "forward_solver.hpp"
#include "model.hpp"

namespace ccma {

inline constexpr int kSceneFormatVersion = 1;

// Scene files are JSON documents (comments allowed):
//
//   { "format": 1, "name": "...", "description": "...",
//     "bodies": [ {"name": "ee", "euler": [g, b, a], "t": [x, y, z]}, ... ],
//     "joints": [ {"kind": "revolute", "body_i": "l1", "body_j": "l2",
//                  "point_i": [..], "point_j": [..],
//                  "axis_i": [..], "axis_j": [..]}, ... ],
//     "bases": [ {"body": "base0", "scheme": "reduced", "initial": [x, y, th]} ],
//     "end_effector": {"body": "ee", "mask": [true, true, true, true, false, false]} }
//
// Bodies may be referenced by name or by index. Fixed and prismatic joints
// also carry "axis2_i"/"axis2_j".
SceneModel load_scene(std::string_view text);
SceneModel load_scene_file(const std::string& path);
std::string serialize_scene(const SceneModel& model);

const std::vector<std::string>& canonical_names();
SceneModel build_canonical(std::string_view name);
// A canonical name, or else a path to a scene file.
SceneModel resolve_scene(std::string_view name_or_path);

using Pose6 = std::array<double, kTaskDims>;

// Waypoint files: { "format": 1, "waypoints": [[x, y, z, g, b, a], ...] }.
// Poses in task order (x, y, z, yaw, pitch, roll). Relative waypoints are
// offsets from the assembled reference end-effector pose.
struct Waypoints {
  std::vector<Pose6> poses;
  bool relative = false;
};

Waypoints load_waypoints(std::string_view text);
Waypoints load_waypoints_file(const std::string& path);
std::string serialize_waypoints(const Waypoints& waypoints);

Vector initial_state(const SceneModel& model);
Vector initial_controls(const SceneModel& model);

struct Assembly {
  Vector s0;
  Vector u0;
  double energy = 0.0;
  int iters = 0;
};

inline constexpr double kAssemblyEnergyTol = 1e-18;

// u0 from the base initial poses; s0 polished by a forward solve. Throws
// InfeasibleScene (with per-block residuals) when E(s0, u0) stays above
// kAssemblyEnergyTol.
Assembly initial_assembly(const SceneModel& model);

}  // namespace ccma

#endif  // CCMA_ASSEMBLY_HPP_
