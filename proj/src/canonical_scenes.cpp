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

#include <cmath>
#include <numbers>
#include <string>

#include "assembly.hpp"
#include "error.hpp"

// Canonical CCMA topologies. Every body starts with its frame aligned to the
// world axes (bases turned by -theta); local anchors are world anchors minus
// the body origin.

namespace ccma {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMountHeight = 0.10;  // base joint above the base frame

Vec3 polar(double radius, double azimuth, double z) {
  return {radius * std::cos(azimuth), radius * std::sin(azimuth), z};
}

constexpr double deg(double d) { return d * kPi / 180.0; }

class SceneBuilder {
 public:
  int body(const std::string& name, const Vec3& origin, double yaw = 0.0) {
    Body b;
    b.name = name;
    b.initial.gamma = yaw;
    b.initial.t = origin;
    model_.bodies.push_back(b);
    return model_.num_bodies() - 1;
  }

  int base(const std::string& name, double x, double y, ActuationScheme scheme,
           double theta) {
    const int b = body(name, Vec3(x, y, 0.0), -theta);
    model_.bases.push_back({b, scheme, {x, y, theta}});
    return b;
  }

  void revolute(int i, int j, const Vec3& p, const Vec3& axis) {
    ConstraintBlock c = two_body(ConstraintKind::kRevolute, i, j, p);
    c.axis_i = local_vector(i, axis);
    c.axis_j = local_vector(j, axis);
    model_.joints.push_back(c);
  }

  void spherical(int i, int j, const Vec3& p) {
    model_.joints.push_back(two_body(ConstraintKind::kSpherical, i, j, p));
  }

  void universal(int i, int j, const Vec3& p, const Vec3& axis_on_i,
                 const Vec3& axis_on_j) {
    ConstraintBlock c = two_body(ConstraintKind::kUniversal, i, j, p);
    c.axis_i = local_vector(i, axis_on_i);
    c.axis_j = local_vector(j, axis_on_j);
    model_.joints.push_back(c);
  }

  void fixed(int i, int j, const Vec3& p, const Vec3& a, const Vec3& b) {
    ConstraintBlock c = two_body(ConstraintKind::kFixed, i, j, p);
    c.axis_i = local_vector(i, a);
    c.axis_j = local_vector(j, a);
    c.axis2_i = local_vector(i, b);
    c.axis2_j = local_vector(j, b);
    model_.joints.push_back(c);
  }

  SceneModel finish(std::string name, std::string description, int ee,
                    const TaskMask& mask) {
    model_.name = std::move(name);
    model_.description = std::move(description);
    model_.end_effector = {ee, mask};
    build_blocks(model_);
    return model_;
  }

 private:
  ConstraintBlock two_body(ConstraintKind kind, int i, int j, const Vec3& p) const {
    ConstraintBlock c;
    c.kind = kind;
    c.body_i = i;
    c.body_j = j;
    c.point_i = local_point(i, p);
    c.point_j = local_point(j, p);
    return c;
  }
  Vec3 local_point(int b, const Vec3& p) const {
    const RigidBodyState& s = model_.bodies[b].initial;
    return rotation_matrix(s).transpose() * (p - s.t);
  }
  Vec3 local_vector(int b, const Vec3& v) const {
    return rotation_matrix(model_.bodies[b].initial).transpose() * v.normalized();
  }

  SceneModel model_;
};

// Knee of a two-link chain from `from` to `to`, in the vertical plane through
// both points, bent outward and upward.
Vec3 knee(const Vec3& from, const Vec3& to, double l1, double l2) {
  const Vec3 span = to - from;
  const double d = span.norm();
  if (d >= l1 + l2 || d <= std::abs(l1 - l2)) {
    throw Error(ErrorCode::kInvalidScene, "canonical leg cannot reach its attachment");
  }
  const Vec3 e = span / d;
  const Vec3 horizontal = Vec3(span.x(), span.y(), 0.0).normalized();
  const double psi = std::atan2(e.z(), e.head<2>().norm());
  const Vec3 n = -std::sin(psi) * horizontal + std::cos(psi) * Vec3::UnitZ();
  const double a = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  return from + a * e + std::sqrt(l1 * l1 - a * a) * n;
}

// Normal of the vertical plane containing a leg.
Vec3 leg_normal(const Vec3& from, const Vec3& to) {
  return Vec3::UnitZ().cross(Vec3(to.x() - from.x(), to.y() - from.y(), 0.0)).normalized();
}

constexpr TaskMask kMask4Dof = {true, true, true, true, false, false};
constexpr TaskMask kMask6Dof = {true, true, true, true, true, true};

// Three two-link legs on a triangular platform. Legs 0 and 1 end in a
// universal joint with a vertical platform-side axis; leg 2 ends without a
// couple.
SceneModel four_dof(ActuationScheme scheme) {
  const bool reduced = scheme == ActuationScheme::kReduced;
  constexpr double kBaseRadius = 0.45, kPlatformRadius = 0.12, kPlatformZ = 0.65;
  constexpr double kLower = 0.35, kUpper = 0.35;
  const Vec3 z = Vec3::UnitZ();

  SceneBuilder sb;
  const int ee = sb.body("platform", Vec3(0.0, 0.0, kPlatformZ));
  for (int k = 0; k < 3; ++k) {
    const std::string leg = std::to_string(k);
    const double az = deg(90.0 + 120.0 * k);
    const Vec3 base_xy = polar(kBaseRadius, az, 0.0);
    const int base = sb.base("base" + leg, base_xy.x(), base_xy.y(), scheme, 0.0);
    const Vec3 b = base_xy + Vec3(0.0, 0.0, kMountHeight);
    const Vec3 a = polar(kPlatformRadius, az, kPlatformZ);
    const Vec3 e = knee(b, a, kLower, kUpper);
    const Vec3 m = leg_normal(b, a);
    const bool couple = k < 2;

    const int l1 = sb.body("lower" + leg, 0.5 * (b + e));
    const int l2 = sb.body("upper" + leg, 0.5 * (e + a));
    if (reduced) {
      sb.revolute(base, l1, b, z);
      sb.revolute(l1, l2, e, m);
      sb.universal(l2, ee, a, m, couple ? z : m.cross((a - e).normalized()));
    } else if (couple) {
      sb.fixed(base, l1, b, z, Vec3::UnitX());
      sb.universal(l1, l2, e, z, m);
      sb.universal(l2, ee, a, m, z);
    } else {
      sb.fixed(base, l1, b, z, Vec3::UnitX());
      sb.revolute(l1, l2, e, m);
      sb.spherical(l2, ee, a);
    }
  }
  return reduced
             ? sb.finish("ccma-4dof-reduced",
                         "4-DOF task, three identical two-link legs, passive "
                         "revolute at each base (reduced actuation)",
                         ee, kMask4Dof)
             : sb.finish("ccma-4dof-complete",
                         "4-DOF task, three identical two-link legs bolted "
                         "to the bases (complete actuation)",
                         ee, kMask4Dof);
}

struct ChainLeg {
  double post;   // vertical first link
  double mid;
  double top;
};

// Revolute-only leg: post turning about the base axis, two links hinged on the
// leg-plane normal, and a revolute about the last link's axis at the platform.
void revolute_leg(SceneBuilder& sb, const std::string& leg, int base, int ee,
                  const Vec3& b, const Vec3& a, const ChainLeg& dims) {
  const Vec3 e1 = b + Vec3(0.0, 0.0, dims.post);
  const Vec3 e2 = knee(e1, a, dims.mid, dims.top);
  const Vec3 m = leg_normal(e1, a);
  const int l1 = sb.body("post" + leg, 0.5 * (b + e1));
  const int l2 = sb.body("mid" + leg, 0.5 * (e1 + e2));
  const int l3 = sb.body("top" + leg, 0.5 * (e2 + a));
  sb.revolute(base, l1, b, Vec3::UnitZ());
  sb.revolute(l1, l2, e1, m);
  sb.revolute(l2, l3, e2, m);
  sb.revolute(l3, ee, a, (a - e2).normalized());
}

SceneModel six_dof(bool symmetric) {
  constexpr double kBaseRadius = 0.55, kPlatformRadius = 0.12, kPlatformZ = 0.60;
  constexpr double kAttachOffset = deg(60.0);
  SceneBuilder sb;
  const int ee = sb.body("platform", Vec3(0.0, 0.0, kPlatformZ));
  const ChainLeg sym{0.20, 0.30, 0.30};
  const ChainLeg asym[3] = {
      {0.20, 0.28, 0.32}, {0.16, 0.34, 0.30}, {0.12, 0.32, 0.34}};
  for (int k = 0; k < 3; ++k) {
    const std::string leg = std::to_string(k);
    const double az = deg(90.0 + 120.0 * k);
    const Vec3 base_xy = polar(kBaseRadius, az, 0.0);
    const int base = sb.base("base" + leg, base_xy.x(), base_xy.y(),
                             ActuationScheme::kReduced, 0.0);
    const Vec3 b = base_xy + Vec3(0.0, 0.0, kMountHeight);
    const Vec3 a = polar(kPlatformRadius, az + kAttachOffset, kPlatformZ);
    revolute_leg(sb, leg, base, ee, b, a, symmetric ? sym : asym[k]);
  }
  return symmetric
             ? sb.finish("ccma-6dof-sym",
                         "6-DOF task, three identical revolute-chain legs",
                         ee, kMask6Dof)
             : sb.finish("ccma-6dof-asym",
                         "6-DOF task, three revolute-chain legs with "
                         "different link lengths. Leg dimensions are "
                         "invented.",
                         ee, kMask6Dof);
}

SceneModel six_agents() {
  constexpr double kBaseRadius = 0.55, kPlatformRadius = 0.25, kPlatformZ = 0.62;
  SceneBuilder sb;
  const int ee = sb.body("platform", Vec3(0.0, 0.0, kPlatformZ));
  for (int k = 0; k < 6; ++k) {
    const std::string leg = std::to_string(k);
    const double az = deg(60.0 * k);
    const double offset = deg(k % 2 == 0 ? 55.0 : -55.0);
    const Vec3 base_xy = polar(kBaseRadius, az, 0.0);
    const int base = sb.base("base" + leg, base_xy.x(), base_xy.y(),
                             ActuationScheme::kReduced, 0.0);
    const Vec3 b = base_xy + Vec3(0.0, 0.0, kMountHeight);
    const Vec3 a = polar(kPlatformRadius, az + offset, kPlatformZ);
    const Vec3 e = knee(b, a, 0.35, 0.35);
    const int l1 = sb.body("lower" + leg, 0.5 * (b + e));
    const int l2 = sb.body("upper" + leg, 0.5 * (e + a));
    sb.revolute(base, l1, b, Vec3::UnitZ());
    sb.revolute(l1, l2, e, leg_normal(b, a));
    sb.spherical(l2, ee, a);
  }
  return sb.finish("ccma-6dof-6agents",
                   "6-DOF task carried by six mobile bases on revolute-"
                   "revolute-spherical legs",
                   ee, kMask6Dof);
}

}  // namespace

const std::vector<std::string>& canonical_names() {
  static const std::vector<std::string> names = {
      "ccma-4dof-reduced", "ccma-4dof-complete", "ccma-6dof-sym",
      "ccma-6dof-asym", "ccma-6dof-6agents"};
  return names;
}

SceneModel build_canonical(std::string_view name) {
  if (name == "ccma-4dof-reduced") return four_dof(ActuationScheme::kReduced);
  if (name == "ccma-4dof-complete") return four_dof(ActuationScheme::kComplete);
  if (name == "ccma-6dof-sym") return six_dof(true);
  if (name == "ccma-6dof-asym") return six_dof(false);
  if (name == "ccma-6dof-6agents") return six_agents();
  throw Error(ErrorCode::kUnknownScene,
              "unknown canonical scene '" + std::string(name) + "'");
}

}  // namespace ccma
