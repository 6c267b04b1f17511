/*
 Copyright 2026 The gaitopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "gaitopt/model_io.hpp"

#include <fstream>
#include <map>

namespace gaitopt {
namespace {

const json& require(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(field.empty() ? key : field + "." + key, "missing field");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

Matrix3 parse_inertia(const json& j, const std::string& field) {
  if (j.is_number()) return Matrix3::Identity() * j.get<double>();
  if (j.is_array() && j.size() == 3 && j[0].is_number())
    return json_vector3(j, field).asDiagonal();
  const Matrix m = json_matrix(j, field);
  if (m.rows() != 3 || m.cols() != 3) throw ConfigError(field, "expected 3x3 matrix");
  return m;
}

Vector joint_gains(const json& j, const std::vector<std::string>& joint_names,
                   const std::string& field) {
  const int n = static_cast<int>(joint_names.size());
  if (j.is_number()) return Vector::Constant(n, j.get<double>());
  if (j.is_array()) {
    Vector v = json_vector(j, field);
    if (v.size() != n) throw ConfigError(field, "needs one gain per joint");
    return v;
  }
  if (!j.is_object()) throw ConfigError(field, "expected number, array or object");
  Vector v = Vector::Zero(n);
  for (auto it = j.begin(); it != j.end(); ++it) {
    int idx = -1;
    for (int k = 0; k < n; ++k)
      if (joint_names[k] == it.key()) idx = k;
    if (idx < 0) throw ConfigError(field + "." + it.key(), "unknown joint");
    v[idx] = number(it.value(), field + "." + it.key());
  }
  return v;
}

}  // namespace

Vector json_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

Vector3 json_vector3(const json& j, const std::string& field) {
  const Vector v = json_vector(j, field);
  if (v.size() != 3) throw ConfigError(field, "expected 3 numbers");
  return v;
}

Matrix json_matrix(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw ConfigError(field, "expected a nested array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = json_vector(j[r], field + "[" + std::to_string(r) + "]");
    if (row.size() != cols) throw ConfigError(field, "ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

bool is_linear_model(const json& j) {
  return j.is_object() && j.value("type", std::string("rigid_body")) == "linear";
}

LinearSystem parse_linear_system(const json& j) {
  return LinearSystem(json_matrix(require(j, "A", ""), "A"),
                      json_matrix(require(j, "B", ""), "B"));
}

RigidBodyModel parse_rigid_body_model(const json& j) {
  const std::string name = text(require(j, "name", ""), "name");
  const bool planar = j.value("planar", false);
  const bool fixed = j.value("fixed_base", false);
  if (planar && fixed) throw ConfigError("fixed_base", "cannot combine with planar");
  const BaseType base = fixed ? BaseType::Fixed
                              : (planar ? BaseType::Planar : BaseType::Spatial);
  const Vector3 gravity =
      j.contains("gravity") ? json_vector3(j["gravity"], "gravity") : Vector3(0, 0, -9.81);

  const json& jlinks = require(j, "links", "");
  if (!jlinks.is_array() || jlinks.empty()) throw ConfigError("links", "expected a non-empty array");
  std::vector<Link> links;
  std::map<std::string, int> link_ids;
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const std::string field = "links[" + std::to_string(i) + "]";
    const json& jl = jlinks[i];
    Link link;
    link.name = text(require(jl, "name", field), field + ".name");
    link.mass = number(require(jl, "mass", field), field + ".mass");
    link.inertia = parse_inertia(require(jl, "inertia", field), field + ".inertia");
    if (jl.contains("com")) link.com = json_vector3(jl["com"], field + ".com");
    if (link_ids.count(link.name)) throw ConfigError(field + ".name", "duplicate link");
    link_ids[link.name] = static_cast<int>(i);
    links.push_back(link);
  }
  auto link_id = [&](const json& v, const std::string& field) {
    const std::string n = text(v, field);
    auto it = link_ids.find(n);
    if (it == link_ids.end()) throw ConfigError(field, "unknown link '" + n + "'");
    return it->second;
  };

  const json jjoints = j.value("joints", json::array());
  std::vector<Joint> joints;
  std::vector<std::string> joint_names;
  std::vector<bool> is_child(links.size(), false);
  for (std::size_t i = 0; i < jjoints.size(); ++i) {
    const std::string field = "joints[" + std::to_string(i) + "]";
    const json& jj = jjoints[i];
    Joint joint;
    joint.name = text(require(jj, "name", field), field + ".name");
    const std::string type = jj.value("type", std::string("revolute"));
    if (type == "revolute") joint.type = JointType::Revolute;
    else if (type == "prismatic") joint.type = JointType::Prismatic;
    else throw ConfigError(field + ".type", "unknown joint type '" + type + "'");
    joint.axis = json_vector3(require(jj, "axis", field), field + ".axis");
    joint.parent = link_id(require(jj, "parent", field), field + ".parent");
    joint.child = link_id(require(jj, "child", field), field + ".child");
    if (jj.contains("origin")) {
      const json& o = jj["origin"];
      if (o.contains("xyz")) joint.origin_position = json_vector3(o["xyz"], field + ".origin.xyz");
      if (o.contains("rpy")) {
        const Vector3 rpy = json_vector3(o["rpy"], field + ".origin.rpy");
        joint.origin_rotation = rotation_from_rpy(rpy[0], rpy[1], rpy[2]);
      }
    }
    is_child[joint.child] = true;
    joints.push_back(joint);
    joint_names.push_back(joint.name);
  }

  // The constructor expects the base at index 0.
  int root = -1;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (is_child[i]) continue;
    if (root != -1) throw ConfigError("joints", "more than one root link");
    root = static_cast<int>(i);
  }
  if (root == -1) throw ConfigError("joints", "no root link (kinematic loop)");
  if (root != 0) {
    std::swap(links[0], links[root]);
    auto swap_id = [&](int& id) {
      if (id == 0) id = root;
      else if (id == root) id = 0;
    };
    for (auto& joint : joints) {
      swap_id(joint.parent);
      swap_id(joint.child);
    }
    std::swap(link_ids[links[0].name], link_ids[links[root].name]);
  }

  std::vector<Foot> feet;
  const json jfeet = j.value("feet", json::array());
  for (std::size_t i = 0; i < jfeet.size(); ++i) {
    const std::string field = "feet[" + std::to_string(i) + "]";
    Foot foot;
    foot.name = text(require(jfeet[i], "name", field), field + ".name");
    foot.link = link_id(require(jfeet[i], "link", field), field + ".link");
    if (jfeet[i].contains("offset"))
      foot.offset = json_vector3(jfeet[i]["offset"], field + ".offset");
    feet.push_back(foot);
  }

  std::vector<int> actuated;
  const json jact = j.value("actuated_joints", json(joint_names));
  for (std::size_t i = 0; i < jact.size(); ++i) {
    const std::string field = "actuated_joints[" + std::to_string(i) + "]";
    const std::string n = text(jact[i], field);
    int idx = -1;
    for (std::size_t k = 0; k < joint_names.size(); ++k)
      if (joint_names[k] == n) idx = static_cast<int>(k);
    if (idx < 0) throw ConfigError(field, "unknown joint '" + n + "'");
    actuated.push_back(idx);
  }

  PdGains gains;
  if (j.contains("pd_hold")) {
    const json& pd = j["pd_hold"];
    if (pd.contains("kp")) gains.kp = joint_gains(pd["kp"], joint_names, "pd_hold.kp");
    if (pd.contains("kd")) gains.kd = joint_gains(pd["kd"], joint_names, "pd_hold.kd");
  }

  return RigidBodyModel(name, base, std::move(links), std::move(joints),
                        std::move(feet), std::move(actuated), gravity,
                        std::move(gains));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

RigidBodyModel load_rigid_body_model(const std::filesystem::path& path) {
  return parse_rigid_body_model(read_json_file(path));
}

}  // namespace gaitopt
