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

#include "gaitopt/rigid_body_model.hpp"

#include <cmath>
#include <numeric>
#include <queue>

namespace gaitopt {

Matrix3 rotation_from_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vector3::UnitZ()) *
          Eigen::AngleAxisd(pitch, Vector3::UnitY()) *
          Eigen::AngleAxisd(roll, Vector3::UnitX()))
      .toRotationMatrix();
}

RigidBodyModel::RigidBodyModel(std::string name, BaseType base,
                               std::vector<Link> links,
                               std::vector<Joint> joints,
                               std::vector<Foot> feet,
                               std::vector<int> actuated_joints,
                               Vector3 gravity, PdGains pd_hold)
    : name_(std::move(name)),
      base_(base),
      links_(std::move(links)),
      joints_(std::move(joints)),
      feet_(std::move(feet)),
      actuated_(std::move(actuated_joints)),
      gravity_(gravity),
      pd_hold_(std::move(pd_hold)) {
  validate_and_sort();

  const int nb = num_base_dofs();
  base_subspace_.setZero(6, nb);
  if (base_ == BaseType::Spatial) {
    base_subspace_.setIdentity(6, 6);
  } else if (base_ == BaseType::Planar) {
    base_subspace_(1, 0) = 1.0;  // omega_y
    base_subspace_(3, 1) = 1.0;  // v_x
    base_subspace_(5, 2) = 1.0;  // v_z
  }

  selection_t_.setZero(num_dofs(), num_actuated());
  for (int k = 0; k < num_actuated(); ++k)
    selection_t_(nb + actuated_[k], k) = 1.0;
}

int RigidBodyModel::num_base_dofs() const {
  switch (base_) {
    case BaseType::Fixed: return 0;
    case BaseType::Planar: return 3;
    case BaseType::Spatial: return 6;
  }
  return 0;
}

double RigidBodyModel::total_mass() const {
  double m = 0.0;
  for (const auto& link : links_) m += link.mass;
  return m;
}

RigidBodyModel RigidBodyModel::scaled_masses(double scale) const {
  RigidBodyModel copy = *this;
  for (auto& link : copy.links_) {
    link.mass *= scale;
    link.inertia *= scale;
  }
  return copy;
}

int RigidBodyModel::link_index(const std::string& name) const {
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].name == name) return static_cast<int>(i);
  return -1;
}

int RigidBodyModel::joint_index(const std::string& name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i)
    if (joints_[i].name == name) return static_cast<int>(i);
  return -1;
}

void RigidBodyModel::validate_and_sort() {
  const int n_links = static_cast<int>(links_.size());
  const int n_joints = static_cast<int>(joints_.size());
  if (n_links < 1) throw ConfigError("links", "at least the base link is required");
  if (n_joints != n_links - 1)
    throw ConfigError("joints", "a tree needs exactly one joint per non-base link");

  for (int i = 0; i < n_links; ++i) {
    const Link& link = links_[i];
    const std::string field = "links[" + std::to_string(i) + "]";
    if (!(link.mass > 0.0)) throw ConfigError(field + ".mass", "must be > 0");
    if ((link.inertia - link.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError(field + ".inertia", "must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix3> eig(link.inertia);
    if (!(eig.eigenvalues().minCoeff() > 0.0))
      throw ConfigError(field + ".inertia", "must be positive definite");
  }

  // Breadth-first order from the base: new link index k + 1 for joint k.
  std::vector<int> joint_of_child(n_links, -1);
  for (int j = 0; j < n_joints; ++j) {
    const Joint& joint = joints_[j];
    const std::string field = "joints[" + std::to_string(j) + "]";
    if (joint.parent < 0 || joint.parent >= n_links || joint.child <= 0 ||
        joint.child >= n_links || joint.parent == joint.child)
      throw ConfigError(field, "invalid parent/child link");
    if (joint_of_child[joint.child] != -1)
      throw ConfigError(field, "link has two parent joints (loop)");
    joint_of_child[joint.child] = j;
    if (std::abs(joint.axis.norm() - 1.0) > 1e-9)
      throw ConfigError(field + ".axis", "must be a unit vector");
    if (base_ == BaseType::Planar) {
      const bool in_plane = joint.type == JointType::Revolute
                                ? std::abs(std::abs(joint.axis.y()) - 1.0) < 1e-12
                                : std::abs(joint.axis.y()) < 1e-12;
      if (!in_plane)
        throw ConfigError(field + ".axis", "planar models need y-axis revolute joints "
                                           "and x-z prismatic joints");
    }
  }

  std::vector<int> new_index(n_links, -1);
  std::vector<int> order;  // old link indices in new order
  new_index[0] = 0;
  order.push_back(0);
  std::queue<int> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    const int parent = frontier.front();
    frontier.pop();
    for (int j = 0; j < n_joints; ++j) {
      if (joints_[j].parent != parent) continue;
      const int child = joints_[j].child;
      if (new_index[child] != -1) continue;
      new_index[child] = static_cast<int>(order.size());
      order.push_back(child);
      frontier.push(child);
    }
  }
  if (static_cast<int>(order.size()) != n_links)
    throw ConfigError("joints", "not every link is connected to the base");

  std::vector<Link> links;
  std::vector<Joint> joints;
  std::vector<int> old_joint_for_new(n_joints);
  for (int k = 0; k < n_links; ++k) links.push_back(links_[order[k]]);
  for (int k = 1; k < n_links; ++k) {
    const int j = joint_of_child[order[k]];
    Joint joint = joints_[j];
    joint.parent = new_index[joint.parent];
    joint.child = k;
    joints.push_back(joint);
    old_joint_for_new[k - 1] = j;
  }
  std::vector<int> joint_new_index(n_joints);
  for (int k = 0; k < n_joints; ++k) joint_new_index[old_joint_for_new[k]] = k;

  for (auto& foot : feet_) {
    if (foot.link < 0 || foot.link >= n_links)
      throw ConfigError("feet." + foot.name, "unknown link");
    foot.link = new_index[foot.link];
  }
  for (auto& a : actuated_) {
    if (a < 0 || a >= n_joints) throw ConfigError("actuated_joints", "unknown joint");
    a = joint_new_index[a];
  }
  auto remap = [&](Vector& gains, const char* field) {
    if (gains.size() == 0) {
      gains = Vector::Zero(n_joints);
      return;
    }
    if (gains.size() != n_joints)
      throw ConfigError(std::string("pd_hold.") + field, "needs one gain per joint");
    Vector out(n_joints);
    for (int j = 0; j < n_joints; ++j) out[joint_new_index[j]] = gains[j];
    gains = out;
  };
  remap(pd_hold_.kp, "kp");
  remap(pd_hold_.kd, "kd");

  links_ = std::move(links);
  joints_ = std::move(joints);
}

}  // namespace gaitopt
