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

#pragma once

#include <string>
#include <vector>

#include "gaitopt/common.hpp"

namespace gaitopt {

enum class BaseType { Fixed, Planar, Spatial };
enum class JointType { Revolute, Prismatic };

struct Link {
  std::string name;
  double mass = 0.0;
  Matrix3 inertia = Matrix3::Zero();  // about the CoM, link frame
  Vector3 com = Vector3::Zero();      // link frame
};

struct Joint {
  std::string name;
  JointType type = JointType::Revolute;
  Vector3 axis = Vector3::UnitY();  // joint frame, unit length
  int parent = 0;                   // link index
  int child = 1;                    // link index
  Vector3 origin_position = Vector3::Zero();
  Matrix3 origin_rotation = Matrix3::Identity();
};

struct Foot {
  std::string name;
  int link = 0;
  Vector3 offset = Vector3::Zero();
};

struct PdGains {
  Vector kp;  // per joint
  Vector kd;
};

/// Description of a kinematic tree on a fixed, planar (pitch, x, z) or
/// spatial (roll-pitch-yaw, xyz) floating base.
///
/// Link 0 is the base. After construction joint j moves link j + 1 and
/// every parent link precedes its children, so forward sweeps can run in
/// index order.
class RigidBodyModel {
 public:
  RigidBodyModel(std::string name, BaseType base, std::vector<Link> links,
                 std::vector<Joint> joints, std::vector<Foot> feet,
                 std::vector<int> actuated_joints, Vector3 gravity,
                 PdGains pd_hold);

  const std::string& name() const { return name_; }
  BaseType base_type() const { return base_; }
  bool planar() const { return base_ == BaseType::Planar; }

  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<Foot>& feet() const { return feet_; }
  const std::vector<int>& actuated_joints() const { return actuated_; }
  const Vector3& gravity() const { return gravity_; }
  const PdGains& pd_hold() const { return pd_hold_; }

  int num_base_dofs() const;  // 0, 3 or 6
  int num_joints() const { return static_cast<int>(joints_.size()); }
  int num_dofs() const { return num_base_dofs() + num_joints(); }
  int num_actuated() const { return static_cast<int>(actuated_.size()); }
  int num_feet() const { return static_cast<int>(feet_.size()); }
  /// Number of force components per foot reported to users (2 planar).
  int force_dims() const { return planar() ? 2 : 3; }

  /// Base velocity subspace in [angular; linear] body coordinates (6 x nb).
  const Eigen::Matrix<double, 6, Eigen::Dynamic>& base_subspace() const {
    return base_subspace_;
  }

  /// Maps actuated torques to generalized forces (nv x nu); zero base rows.
  const Matrix& selection_transpose() const { return selection_t_; }

  double total_mass() const;

  /// Copy with every link mass and inertia multiplied by `scale`.
  RigidBodyModel scaled_masses(double scale) const;

  int link_index(const std::string& name) const;  // -1 if absent
  int joint_index(const std::string& name) const;

 private:
  void validate_and_sort();

  std::string name_;
  BaseType base_;
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::vector<Foot> feet_;
  std::vector<int> actuated_;
  Vector3 gravity_;
  PdGains pd_hold_;
  Eigen::Matrix<double, 6, Eigen::Dynamic> base_subspace_;
  Matrix selection_t_;
};

Matrix3 rotation_from_rpy(double roll, double pitch, double yaw);

}  // namespace gaitopt
