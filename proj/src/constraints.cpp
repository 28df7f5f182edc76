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

#include "constraints.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace ccma {

Vector6 eval_revolute(const RigidBodyState& state_i,
                      const RigidBodyState& state_j, const Vec3& p_i,
                      const Vec3& p_j, const Vec3& v_i, const Vec3& v_j) {
  Vector6 c;
  c.head<3>() = transform_point(state_j, p_j) - transform_point(state_i, p_i);
  c.tail<3>() = transform_vector(state_j, v_j) - transform_vector(state_i, v_i);
  return c;
}

Vec3 eval_spherical(const RigidBodyState& state_i,
                    const RigidBodyState& state_j, const Vec3& p_i,
                    const Vec3& p_j) {
  return transform_point(state_j, p_j) - transform_point(state_i, p_i);
}

Eigen::Matrix<double, 9, 1> eval_fixed(
    const RigidBodyState& state_i, const RigidBodyState& state_j,
    const Vec3& p_i, const Vec3& p_j, const Vec3& a_i, const Vec3& a_j,
    const Vec3& b_i, const Vec3& b_j) {
  Eigen::Matrix<double, 9, 1> c;
  c.segment<3>(0) = transform_point(state_j, p_j) - transform_point(state_i, p_i);
  c.segment<3>(3) = transform_vector(state_j, a_j) - transform_vector(state_i, a_i);
  c.segment<3>(6) = transform_vector(state_j, b_j) - transform_vector(state_i, b_i);
  return c;
}

Eigen::Vector4d eval_universal(const RigidBodyState& state_i,
                               const RigidBodyState& state_j, const Vec3& p_i,
                               const Vec3& p_j, const Vec3& a_i,
                               const Vec3& b_j) {
  Eigen::Vector4d c;
  c.head<3>() = transform_point(state_j, p_j) - transform_point(state_i, p_i);
  c[3] = transform_vector(state_i, a_i).dot(transform_vector(state_j, b_j));
  return c;
}

Eigen::Matrix<double, 8, 1> eval_prismatic(
    const RigidBodyState& state_i, const RigidBodyState& state_j,
    const Vec3& p_i, const Vec3& p_j, const Vec3& a_i, const Vec3& a_j,
    const Vec3& b_i, const Vec3& b_j) {
  Eigen::Matrix<double, 8, 1> c;
  c.segment<3>(0) = transform_vector(state_j, a_j) - transform_vector(state_i, a_i);
  c.segment<3>(3) = transform_vector(state_j, b_j) - transform_vector(state_i, b_i);
  const Vec3 d = transform_point(state_j, p_j) - transform_point(state_i, p_i);
  c[6] = d.dot(transform_vector(state_i, b_i));
  c[7] = d.dot(transform_vector(state_i, a_i.cross(b_i)));
  return c;
}

Eigen::Vector4d eval_planar_base(const RigidBodyState& state,
                                 const Vec3& normal_local) {
  Eigen::Vector4d c;
  c[0] = state.t.z();
  c.tail<3>() = transform_vector(state, normal_local) - Vec3::UnitZ();
  return c;
}

Eigen::Vector2d eval_motor_xy(const RigidBodyState& state, double u_x,
                              double u_y) {
  return {state.t.x() - u_x, state.t.y() - u_y};
}

Vec3 eval_motor_z(const RigidBodyState& state, double theta,
                  const Vec3& vp_local) {
  return transform_vector(state, rot_z(theta) * vp_local) - Vec3::UnitX();
}

RigidBodyState body_state(const Vector& s, int body) {
  return RigidBodyState::from_coords(
      std::span<const double, kBodyDofs>(s.data() + kBodyDofs * body, kBodyDofs));
}

void check_dimensions(const SceneModel& model, const Vector& s,
                      const Vector& u) {
  const int bodies_in_s = static_cast<int>(s.size() / kBodyDofs);
  const bool s_ragged = s.size() % kBodyDofs != 0;
  for (int b = 0; b < static_cast<int>(model.blocks.size()); ++b) {
    const ConstraintBlock& block = model.blocks[b];
    for (int body : {block.body_i, block.body_j}) {
      if (body == kNoBody) continue;
      if (s_ragged || body >= bodies_in_s) {
        throw Error(ErrorCode::kDimensionMismatch,
                    describe_block(model, b) + ": body index " +
                        std::to_string(body) + " needs state of length >= " +
                        std::to_string(kBodyDofs * (body + 1)) + ", got " +
                        std::to_string(s.size()));
      }
    }
    for (int slot : block.control_slots) {
      if (slot >= u.size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    describe_block(model, b) + ": control slot " +
                        std::to_string(slot) + " out of range for u of length " +
                        std::to_string(u.size()));
      }
    }
  }
  if (s.size() != model.num_states()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state has length " + std::to_string(s.size()) + ", model needs " +
                    std::to_string(model.num_states()));
  }
  if (u.size() != model.num_controls()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "control vector has length " + std::to_string(u.size()) +
                    ", model needs " + std::to_string(model.num_controls()));
  }
}

Vector eval_block(const ConstraintBlock& block, const Vector& s,
                  const Vector& u) {
  const RigidBodyState si = body_state(s, block.body_i);
  switch (block.kind) {
    case ConstraintKind::kRevolute:
      return eval_revolute(si, body_state(s, block.body_j), block.point_i,
                           block.point_j, block.axis_i, block.axis_j);
    case ConstraintKind::kSpherical:
      return eval_spherical(si, body_state(s, block.body_j), block.point_i,
                            block.point_j);
    case ConstraintKind::kFixed:
      return eval_fixed(si, body_state(s, block.body_j), block.point_i,
                        block.point_j, block.axis_i, block.axis_j,
                        block.axis2_i, block.axis2_j);
    case ConstraintKind::kUniversal:
      return eval_universal(si, body_state(s, block.body_j), block.point_i,
                            block.point_j, block.axis_i, block.axis_j);
    case ConstraintKind::kPrismatic:
      return eval_prismatic(si, body_state(s, block.body_j), block.point_i,
                            block.point_j, block.axis_i, block.axis_j,
                            block.axis2_i, block.axis2_j);
    case ConstraintKind::kPlanarBase:
      return eval_planar_base(si, block.axis_i);
    case ConstraintKind::kMotorXY:
      return eval_motor_xy(si, u[block.control_slots[0]],
                           u[block.control_slots[1]]);
    case ConstraintKind::kMotorZ:
      return eval_motor_z(si, u[block.control_slots[0]], block.axis_i);
  }
  return {};
}

Vector assemble_C(const SceneModel& model, const Vector& s, const Vector& u) {
  check_dimensions(model, s, u);
  Vector c(model.num_rows);
  for (const ConstraintBlock& block : model.blocks) {
    c.segment(block.row_offset, block.rows()) = eval_block(block, s, u);
  }
  return c;
}

namespace {

// A 3-vector and its first and second derivatives with respect to the local
// variables of one block.
struct VecJet {
  Vec3 v = Vec3::Zero();
  Eigen::Matrix<double, 3, Eigen::Dynamic> d;
  std::array<Matrix, 3> dd;

  VecJet(int n, bool second) : d(Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, n)) {
    if (second) {
      for (Matrix& h : dd) h = Matrix::Zero(n, n);
    }
  }
  bool has_second() const { return dd[0].size() > 0; }
};

struct ScalarJet {
  double v = 0.0;
  Vector d;
  Matrix dd;
};

struct Frame {
  RotationDerivatives rot;
  Vec3 t;
  int offset;  // first local variable of this body
};

Frame make_frame(const Vector& s, int body, int offset) {
  const RigidBodyState state = body_state(s, body);
  return {rotation_derivatives(state), state.t, offset};
}

// R * v with R depending on the frame's angles.
VecJet direction(const Frame& f, const Vec3& v_local, int n, bool second) {
  VecJet j(n, second);
  j.v = f.rot.value * v_local;
  for (int a = 0; a < 3; ++a) j.d.col(f.offset + a) = f.rot.first[a] * v_local;
  if (second) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Vec3 h = f.rot.d2(a, b) * v_local;
        for (int c = 0; c < 3; ++c) j.dd[c](f.offset + a, f.offset + b) = h[c];
      }
    }
  }
  return j;
}

// R * p + T.
VecJet point(const Frame& f, const Vec3& p_local, int n, bool second) {
  VecJet j = direction(f, p_local, n, second);
  j.v += f.t;
  j.d.block<3, 3>(0, f.offset + 3).setIdentity();
  return j;
}

// R * Rz(theta) * vp where theta is the local variable `var`.
VecJet rotated_by_control(const Frame& f, const Vec3& vp, double theta,
                          int var, int n, bool second) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 rz, rz1, rz2;
  rz << c, -s, 0, s, c, 0, 0, 0, 1;
  rz1 << -s, -c, 0, c, -s, 0, 0, 0, 0;
  rz2 << -c, s, 0, -s, -c, 0, 0, 0, 0;
  const Vec3 w = rz * vp, w1 = rz1 * vp, w2 = rz2 * vp;

  VecJet j = direction(f, w, n, second);
  j.d.col(var) = f.rot.value * w1;
  if (second) {
    for (int a = 0; a < 3; ++a) {
      const Vec3 h = f.rot.first[a] * w1;
      for (int k = 0; k < 3; ++k) {
        j.dd[k](f.offset + a, var) = h[k];
        j.dd[k](var, f.offset + a) = h[k];
      }
    }
    const Vec3 h = f.rot.value * w2;
    for (int k = 0; k < 3; ++k) j.dd[k](var, var) = h[k];
  }
  return j;
}

VecJet operator-(const VecJet& a, const VecJet& b) {
  VecJet r = a;
  r.v -= b.v;
  r.d -= b.d;
  if (r.has_second()) {
    for (int c = 0; c < 3; ++c) r.dd[c] -= b.dd[c];
  }
  return r;
}

VecJet minus_constant(VecJet a, const Vec3& k) {
  a.v -= k;
  return a;
}

ScalarJet dot(const VecJet& a, const VecJet& b) {
  ScalarJet r;
  r.v = a.v.dot(b.v);
  r.d = a.d.transpose() * b.v + b.d.transpose() * a.v;
  if (a.has_second()) {
    r.dd = a.d.transpose() * b.d + b.d.transpose() * a.d;
    for (int c = 0; c < 3; ++c) r.dd += a.v[c] * b.dd[c] + b.v[c] * a.dd[c];
  }
  return r;
}

class RowWriter {
 public:
  RowWriter(BlockDerivatives& out, int rows, int n, bool second)
      : out_(out), second_(second) {
    out_.value = Vector::Zero(rows);
    out_.jacobian = Matrix::Zero(rows, n);
    if (second) out_.hessian.assign(rows, Matrix::Zero(n, n));
  }

  void push(const VecJet& j) {
    for (int c = 0; c < 3; ++c) {
      out_.value[row_] = j.v[c];
      out_.jacobian.row(row_) = j.d.row(c);
      if (second_) out_.hessian[row_] = j.dd[c];
      ++row_;
    }
  }

  void push(const ScalarJet& j) {
    out_.value[row_] = j.v;
    out_.jacobian.row(row_) = j.d.transpose();
    if (second_) out_.hessian[row_] = j.dd;
    ++row_;
  }

  // Scalar equal to one local variable minus a constant.
  void push_linear(int var, double value) {
    out_.value[row_] = value;
    out_.jacobian(row_, var) = 1.0;
    ++row_;
  }

  BlockDerivatives& out() { return out_; }

 private:
  BlockDerivatives& out_;
  bool second_;
  int row_ = 0;
};

}  // namespace

std::vector<VarRef> block_variables(const ConstraintBlock& block) {
  std::vector<VarRef> vars;
  for (int body : {block.body_i, block.body_j}) {
    if (body == kNoBody) continue;
    for (int k = 0; k < kBodyDofs; ++k) {
      vars.push_back({VarRef::Space::kState, kBodyDofs * body + k});
    }
  }
  for (int slot : block.control_slots) {
    vars.push_back({VarRef::Space::kControl, slot});
  }
  return vars;
}

BlockDerivatives block_derivatives(const ConstraintBlock& block,
                                   const Vector& s, const Vector& u,
                                   bool second_order) {
  BlockDerivatives out;
  out.vars = block_variables(block);
  const int n = static_cast<int>(out.vars.size());
  const bool two_body = block.body_j != kNoBody;
  const Frame fi = make_frame(s, block.body_i, 0);
  const Frame fj = two_body ? make_frame(s, block.body_j, kBodyDofs) : fi;
  RowWriter w(out, block.rows(), n, second_order);
  const bool so = second_order;

  switch (block.kind) {
    case ConstraintKind::kRevolute:
      w.push(point(fj, block.point_j, n, so) - point(fi, block.point_i, n, so));
      w.push(direction(fj, block.axis_j, n, so) - direction(fi, block.axis_i, n, so));
      break;
    case ConstraintKind::kSpherical:
      w.push(point(fj, block.point_j, n, so) - point(fi, block.point_i, n, so));
      break;
    case ConstraintKind::kFixed:
      w.push(point(fj, block.point_j, n, so) - point(fi, block.point_i, n, so));
      w.push(direction(fj, block.axis_j, n, so) - direction(fi, block.axis_i, n, so));
      w.push(direction(fj, block.axis2_j, n, so) -
             direction(fi, block.axis2_i, n, so));
      break;
    case ConstraintKind::kUniversal:
      w.push(point(fj, block.point_j, n, so) - point(fi, block.point_i, n, so));
      w.push(dot(direction(fi, block.axis_i, n, so),
                 direction(fj, block.axis_j, n, so)));
      break;
    case ConstraintKind::kPrismatic: {
      w.push(direction(fj, block.axis_j, n, so) - direction(fi, block.axis_i, n, so));
      w.push(direction(fj, block.axis2_j, n, so) -
             direction(fi, block.axis2_i, n, so));
      const VecJet d =
          point(fj, block.point_j, n, so) - point(fi, block.point_i, n, so);
      w.push(dot(d, direction(fi, block.axis2_i, n, so)));
      w.push(dot(d, direction(fi, block.axis_i.cross(block.axis2_i), n, so)));
      break;
    }
    case ConstraintKind::kPlanarBase:
      w.push_linear(5, fi.t.z());
      w.push(minus_constant(direction(fi, block.axis_i, n, so), Vec3::UnitZ()));
      break;
    case ConstraintKind::kMotorXY: {
      w.push_linear(3, fi.t.x() - u[block.control_slots[0]]);
      BlockDerivatives& o = w.out();
      o.jacobian(0, 6) = -1.0;
      w.push_linear(4, fi.t.y() - u[block.control_slots[1]]);
      o.jacobian(1, 7) = -1.0;
      break;
    }
    case ConstraintKind::kMotorZ:
      w.push(minus_constant(
          rotated_by_control(fi, block.axis_i, u[block.control_slots[0]], 6, n, so),
          Vec3::UnitX()));
      break;
  }
  return out;
}

Linearization linearize(const SceneModel& model, const Vector& s,
                        const Vector& u, bool with_curvature) {
  check_dimensions(model, s, u);
  const int ns = model.num_states(), nu = model.num_controls();
  Linearization lin;
  lin.c = Vector::Zero(model.num_rows);
  lin.jac_s = Matrix::Zero(model.num_rows, ns);
  lin.jac_u = Matrix::Zero(model.num_rows, nu);
  if (with_curvature) {
    lin.curvature_ss = Matrix::Zero(ns, ns);
    lin.curvature_su = Matrix::Zero(ns, nu);
  }
  for (const ConstraintBlock& block : model.blocks) {
    const BlockDerivatives bd = block_derivatives(block, s, u, with_curvature);
    const int rows = block.rows();
    const int nv = static_cast<int>(bd.vars.size());
    lin.c.segment(block.row_offset, rows) = bd.value;
    for (int a = 0; a < nv; ++a) {
      const VarRef& va = bd.vars[a];
      Matrix& jac = va.space == VarRef::Space::kState ? lin.jac_s : lin.jac_u;
      jac.block(block.row_offset, va.index, rows, 1) += bd.jacobian.col(a);
    }
    if (!with_curvature) continue;
    for (int r = 0; r < rows; ++r) {
      const double weight = bd.value[r];
      if (weight == 0.0) continue;
      const Matrix& h = bd.hessian[r];
      for (int a = 0; a < nv; ++a) {
        if (bd.vars[a].space != VarRef::Space::kState) continue;
        for (int b = 0; b < nv; ++b) {
          const double hab = h(a, b);
          if (hab == 0.0) continue;
          if (bd.vars[b].space == VarRef::Space::kState) {
            lin.curvature_ss(bd.vars[a].index, bd.vars[b].index) += weight * hab;
          } else {
            lin.curvature_su(bd.vars[a].index, bd.vars[b].index) += weight * hab;
          }
        }
      }
    }
  }
  return lin;
}

Matrix jacobian_s(const SceneModel& model, const Vector& s, const Vector& u) {
  return linearize(model, s, u, false).jac_s;
}

Matrix jacobian_u(const SceneModel& model, const Vector& s, const Vector& u) {
  return linearize(model, s, u, false).jac_u;
}

std::vector<BlockDerivatives> block_second_derivs(const SceneModel& model,
                                                  const Vector& s,
                                                  const Vector& u) {
  check_dimensions(model, s, u);
  std::vector<BlockDerivatives> out;
  out.reserve(model.blocks.size());
  for (const ConstraintBlock& block : model.blocks) {
    out.push_back(block_derivatives(block, s, u, true));
  }
  return out;
}

}  // namespace ccma
