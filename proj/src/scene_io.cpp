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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "assembly.hpp"
#include "error.hpp"
#include "json.hpp"

namespace ccma {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Axis norms closer to one than this are kept bit-for-bit.
constexpr double kUnitExact = 1e-12;
constexpr double kUnitTolerance = 1e-6;

[[noreturn]] void fail(ErrorCode code, const std::string& where,
                       const std::string& what) {
  throw Error(code, where + ": " + what);
}

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end(), nullptr, true,
                       /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line/column location.
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find(": "); pos != std::string::npos) {
      what = what.substr(pos + 2);
    }
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) +
                                            ", column " + std::to_string(column) +
                                            ": " + what);
  }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::kParseError, where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorCode::kParseError, where, std::string("missing field '") + key + "'");
  }
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorCode::kParseError, where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorCode::kParseError, where, "non-finite number");
  return v;
}

template <std::size_t N>
std::array<double, N> numbers(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    fail(ErrorCode::kParseError, where,
         "expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    out[k] = number(j[k], where + "[" + std::to_string(k) + "]");
  }
  return out;
}

Vec3 vec3(const Json& j, const std::string& where) {
  const auto a = numbers<3>(j, where);
  return {a[0], a[1], a[2]};
}

Vec3 unit_axis(const Json& j, const std::string& where) {
  Vec3 v = vec3(j, where);
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > kUnitTolerance) {
    fail(ErrorCode::kNonUnitAxis, where,
         "axis norm " + std::to_string(norm) + " is not 1 within 1e-6");
  }
  if (std::abs(norm - 1.0) > kUnitExact) v /= norm;
  return v;
}

std::string text_field(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(ErrorCode::kParseError, where, "expected a string");
  return j.get<std::string>();
}

int body_ref(const Json& j, const SceneModel& model, const std::string& where) {
  if (j.is_string()) {
    const int b = model.find_body(j.get<std::string>());
    if (b == kNoBody) {
      fail(ErrorCode::kDanglingBodyRef, where,
           "no body named '" + j.get<std::string>() + "'");
    }
    return b;
  }
  if (j.is_number_integer()) {
    const long long b = j.get<long long>();
    if (b < 0 || b >= model.num_bodies()) {
      fail(ErrorCode::kDanglingBodyRef, where,
           "body index " + std::to_string(b) + " out of range");
    }
    return static_cast<int>(b);
  }
  fail(ErrorCode::kParseError, where, "expected a body name or index");
}

void require_orthogonal(const Vec3& a, const Vec3& b, const std::string& where) {
  if (std::abs(a.dot(b)) > kUnitTolerance) {
    fail(ErrorCode::kInvalidScene, where, "axis and axis2 must be orthogonal");
  }
}

ConstraintBlock parse_joint(const Json& j, const SceneModel& model,
                            const std::string& where) {
  const std::string kind_text = text_field(field(j, "kind", where), where + ".kind");
  const auto kind = parse_joint_kind(kind_text);
  if (!kind) fail(ErrorCode::kParseError, where + ".kind", "unknown joint kind '" + kind_text + "'");

  ConstraintBlock block;
  block.kind = *kind;
  block.body_i = body_ref(field(j, "body_i", where), model, where + ".body_i");
  block.body_j = body_ref(field(j, "body_j", where), model, where + ".body_j");
  if (block.body_i == block.body_j) {
    fail(ErrorCode::kInvalidScene, where, "a joint needs two distinct bodies");
  }
  block.point_i = vec3(field(j, "point_i", where), where + ".point_i");
  block.point_j = vec3(field(j, "point_j", where), where + ".point_j");
  const bool has_axis = block.kind != ConstraintKind::kSpherical;
  const bool has_axis2 = block.kind == ConstraintKind::kFixed ||
                         block.kind == ConstraintKind::kPrismatic;
  if (has_axis) {
    block.axis_i = unit_axis(field(j, "axis_i", where), where + ".axis_i");
    block.axis_j = unit_axis(field(j, "axis_j", where), where + ".axis_j");
  }
  if (has_axis2) {
    block.axis2_i = unit_axis(field(j, "axis2_i", where), where + ".axis2_i");
    block.axis2_j = unit_axis(field(j, "axis2_j", where), where + ".axis2_j");
    require_orthogonal(block.axis_i, block.axis2_i, where + " (body_i)");
    require_orthogonal(block.axis_j, block.axis2_j, where + " (body_j)");
  }
  return block;
}

OrderedJson json_vec(const Vec3& v) { return OrderedJson::array({v.x(), v.y(), v.z()}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SceneModel load_scene(std::string_view text) {
  const Json doc = parse_document(text);
  const std::string root = "scene";
  if (!doc.is_object()) fail(ErrorCode::kParseError, root, "expected an object");

  const Json& format = field(doc, "format", root);
  if (!format.is_number_integer() || format.get<int>() != kSceneFormatVersion) {
    fail(ErrorCode::kParseError, "format",
         "unsupported format version (expected " +
             std::to_string(kSceneFormatVersion) + ")");
  }

  SceneModel model;
  if (doc.contains("name")) model.name = text_field(doc["name"], "name");
  if (doc.contains("description")) {
    model.description = text_field(doc["description"], "description");
  }

  const Json& bodies = field(doc, "bodies", root);
  if (!bodies.is_array() || bodies.empty()) {
    fail(ErrorCode::kParseError, "bodies", "expected a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string where = "bodies[" + std::to_string(i) + "]";
    Body body;
    body.name = text_field(field(bodies[i], "name", where), where + ".name");
    if (!names.insert(body.name).second) {
      fail(ErrorCode::kInvalidScene, where, "duplicate body name '" + body.name + "'");
    }
    const auto euler = numbers<3>(field(bodies[i], "euler", where), where + ".euler");
    body.initial.gamma = euler[0];
    body.initial.beta = euler[1];
    body.initial.alpha = euler[2];
    body.initial.t = vec3(field(bodies[i], "t", where), where + ".t");
    model.bodies.push_back(std::move(body));
  }

  if (doc.contains("joints")) {
    const Json& joints = doc["joints"];
    if (!joints.is_array()) fail(ErrorCode::kParseError, "joints", "expected an array");
    for (std::size_t i = 0; i < joints.size(); ++i) {
      model.joints.push_back(
          parse_joint(joints[i], model, "joints[" + std::to_string(i) + "]"));
    }
  }

  const Json& bases = field(doc, "bases", root);
  if (!bases.is_array() || bases.empty()) {
    fail(ErrorCode::kInvalidScene, "bases", "a scene needs at least one mobile base");
  }
  std::set<int> base_bodies;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const std::string where = "bases[" + std::to_string(k) + "]";
    MobileBase base;
    base.body = body_ref(field(bases[k], "body", where), model, where + ".body");
    if (!base_bodies.insert(base.body).second) {
      fail(ErrorCode::kDuplicateBase, where,
           "body '" + model.bodies[base.body].name + "' is already a mobile base");
    }
    const std::string scheme =
        text_field(field(bases[k], "scheme", where), where + ".scheme");
    if (scheme == "reduced") {
      base.scheme = ActuationScheme::kReduced;
    } else if (scheme == "complete") {
      base.scheme = ActuationScheme::kComplete;
    } else {
      fail(ErrorCode::kParseError, where + ".scheme",
           "expected 'reduced' or 'complete'");
    }
    base.initial = numbers<3>(field(bases[k], "initial", where), where + ".initial");
    model.bases.push_back(base);
  }

  const Json& ee = field(doc, "end_effector", root);
  model.end_effector.body = body_ref(field(ee, "body", "end_effector"), model,
                                     "end_effector.body");
  const Json& mask = field(ee, "mask", "end_effector");
  if (!mask.is_array() || mask.size() != kTaskDims) {
    fail(ErrorCode::kParseError, "end_effector.mask", "expected 6 booleans");
  }
  bool any = false;
  for (int k = 0; k < kTaskDims; ++k) {
    if (!mask[k].is_boolean()) {
      fail(ErrorCode::kParseError, "end_effector.mask[" + std::to_string(k) + "]",
           "expected a boolean");
    }
    model.end_effector.mask[k] = mask[k].get<bool>();
    any = any || model.end_effector.mask[k];
  }
  if (!any) {
    fail(ErrorCode::kInvalidScene, "end_effector.mask",
         "at least one task coordinate must be selected");
  }

  build_blocks(model);
  return model;
}

SceneModel load_scene_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return load_scene(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string serialize_scene(const SceneModel& model) {
  OrderedJson doc;
  doc["format"] = kSceneFormatVersion;
  doc["name"] = model.name;
  if (!model.description.empty()) doc["description"] = model.description;

  OrderedJson bodies = OrderedJson::array();
  for (const Body& b : model.bodies) {
    OrderedJson jb;
    jb["name"] = b.name;
    jb["euler"] = {b.initial.gamma, b.initial.beta, b.initial.alpha};
    jb["t"] = json_vec(b.initial.t);
    bodies.push_back(std::move(jb));
  }
  doc["bodies"] = std::move(bodies);

  OrderedJson joints = OrderedJson::array();
  for (const ConstraintBlock& j : model.joints) {
    OrderedJson jj;
    jj["kind"] = kind_name(j.kind);
    jj["body_i"] = model.bodies[j.body_i].name;
    jj["body_j"] = model.bodies[j.body_j].name;
    jj["point_i"] = json_vec(j.point_i);
    jj["point_j"] = json_vec(j.point_j);
    if (j.kind != ConstraintKind::kSpherical) {
      jj["axis_i"] = json_vec(j.axis_i);
      jj["axis_j"] = json_vec(j.axis_j);
    }
    if (j.kind == ConstraintKind::kFixed || j.kind == ConstraintKind::kPrismatic) {
      jj["axis2_i"] = json_vec(j.axis2_i);
      jj["axis2_j"] = json_vec(j.axis2_j);
    }
    joints.push_back(std::move(jj));
  }
  doc["joints"] = std::move(joints);

  OrderedJson bases = OrderedJson::array();
  for (const MobileBase& b : model.bases) {
    OrderedJson jb;
    jb["body"] = model.bodies[b.body].name;
    jb["scheme"] = b.scheme == ActuationScheme::kReduced ? "reduced" : "complete";
    jb["initial"] = {b.initial[0], b.initial[1], b.initial[2]};
    bases.push_back(std::move(jb));
  }
  doc["bases"] = std::move(bases);

  OrderedJson ee;
  ee["body"] = model.bodies[model.end_effector.body].name;
  ee["mask"] = OrderedJson::array();
  for (bool m : model.end_effector.mask) ee["mask"].push_back(m);
  doc["end_effector"] = std::move(ee);
  return doc.dump(2) + "\n";
}

Waypoints load_waypoints(std::string_view text) {
  const Json doc = parse_document(text);
  const Json& format = field(doc, "format", "waypoints file");
  if (!format.is_number_integer() || format.get<int>() != kSceneFormatVersion) {
    fail(ErrorCode::kParseError, "format", "unsupported format version");
  }
  const Json& list = field(doc, "waypoints", "waypoints file");
  if (!list.is_array()) fail(ErrorCode::kParseError, "waypoints", "expected an array");
  Waypoints out;
  if (doc.contains("relative")) {
    if (!doc["relative"].is_boolean()) {
      fail(ErrorCode::kParseError, "relative", "expected true or false");
    }
    out.relative = doc["relative"].get<bool>();
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.poses.push_back(
        numbers<kTaskDims>(list[i], "waypoints[" + std::to_string(i) + "]"));
  }
  return out;
}

Waypoints load_waypoints_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return load_waypoints(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string serialize_waypoints(const Waypoints& waypoints) {
  OrderedJson doc;
  doc["format"] = kSceneFormatVersion;
  if (waypoints.relative) doc["relative"] = true;
  doc["waypoints"] = OrderedJson::array();
  for (const Pose6& p : waypoints.poses) doc["waypoints"].push_back(p);
  return doc.dump(2) + "\n";
}

SceneModel resolve_scene(std::string_view name_or_path) {
  for (const std::string& name : canonical_names()) {
    if (name == name_or_path) return build_canonical(name);
  }
  const std::string path(name_or_path);
  if (!std::filesystem::exists(path) &&
      path.find_first_of("/\\.") == std::string::npos) {
    return build_canonical(path);
  }
  return load_scene_file(path);
}

}  // namespace ccma
