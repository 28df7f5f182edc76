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

#include <cstdio>
#include <sstream>

#include "assembly.hpp"
#include "error.hpp"

namespace ccma {

Vector initial_state(const SceneModel& model) {
  Vector s(model.num_states());
  for (int b = 0; b < model.num_bodies(); ++b) {
    const auto c = model.bodies[b].initial.coords();
    for (int k = 0; k < kBodyDofs; ++k) s[kBodyDofs * b + k] = c[k];
  }
  return s;
}

Vector initial_controls(const SceneModel& model) {
  Vector u(model.num_controls());
  for (int k = 0; k < model.num_bases(); ++k) {
    for (int c = 0; c < 3; ++c) u[3 * k + c] = model.bases[k].initial[c];
  }
  return u;
}

Assembly initial_assembly(const SceneModel& model) {
  Assembly out;
  out.u0 = initial_controls(model);
  FkConfig polish;
  polish.grad_tol = 1e-13;
  const SolveReport report = solve_fk(model, initial_state(model), out.u0, polish);
  out.s0 = report.s_hat;
  out.energy = report.energy;
  out.iters = report.iters;
  if (!(out.energy < kAssemblyEnergyTol)) {
    const Vector c = assemble_C(model, out.s0, out.u0);
    std::ostringstream os;
    os << "scene '" << model.name << "' does not assemble (E = " << out.energy
       << "); residual per block:";
    for (int b = 0; b < static_cast<int>(model.blocks.size()); ++b) {
      const ConstraintBlock& block = model.blocks[b];
      const double r = c.segment(block.row_offset, block.rows()).cwiseAbs().maxCoeff();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", r);
      os << "\n  " << describe_block(model, b) << ": " << buf;
    }
    throw Error(ErrorCode::kInfeasibleScene, os.str());
  }
  return out;
}

}  // namespace ccma
