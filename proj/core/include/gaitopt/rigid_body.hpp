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

#include <vector>

#include "gaitopt/common.hpp"
#include "gaitopt/rigid_body_model.hpp"

// Kinematic-tree dynamics. Generalized coordinates are
//   q  = [base orientation, base position (world), joint positions]
//   nu = [base angular velocity, base linear velocity (body), joint rates]
// with orientation = pitch (planar) or roll-pitch-yaw (spatial). All
// spatial quantities are computed in base coordinates, so the recursions
// need no per-link coordinate transforms.

namespace gaitopt {

/// Link poses and joint motion subspaces in base coordinates.
struct TreePoses {
  Matrix3 base_rotation = Matrix3::Identity();  // R_WL
  Vector3 base_position = Vector3::Zero();
  std::vector<Matrix3> rotation;  // per link
  std::vector<Vector3> position;  // per link origin
  std::vector<Vector6> subspace;  // per joint, [angular; linear]
};

TreePoses compute_poses(const RigidBodyModel& model, const Vector& q);

Matrix3 base_rotation(const RigidBodyModel& model, const Vector& q);

/// Throws DynamicsError when pitch is within 1e-3 rad of +-pi/2 on a spatial
/// base.
void check_gimbal_lock(const RigidBodyModel& model, const Vector& q);

/// T(q) with qdot = T(q) nu.
Matrix kinematic_map(const RigidBodyModel& model, const Vector& q);

/// d(T(q) nu)/dq, analytic.
Matrix kinematic_map_derivative(const RigidBodyModel& model, const Vector& q,
                                const Vector& nu);

/// Spatial inertias of all links about the base origin, base coordinates.
std::vector<Matrix6> link_inertias(const RigidBodyModel& model,
                                   const TreePoses& poses);

/// Composite-rigid-body algorithm.
Matrix mass_matrix(const RigidBodyModel& model, const Vector& q);
Matrix mass_matrix(const RigidBodyModel& model, const TreePoses& poses,
                   const std::vector<Matrix6>& inertias);

/// Generalized forces M nudot + C + G (no contact forces). Gravity can be
/// switched off to obtain pure inertial terms.
Vector inverse_dynamics(const RigidBodyModel& model, const Vector& q,
                        const Vector& nu, const Vector& nudot,
                        bool with_gravity = true);
Vector inverse_dynamics(const RigidBodyModel& model, const TreePoses& poses,
                        const std::vector<Matrix6>& inertias, const Vector& nu,
                        const Vector& nudot, bool with_gravity = true);

/// C(q, nu) + G(q).
Vector bias_forces(const RigidBodyModel& model, const Vector& q,
                   const Vector& nu);

struct FootKinematics {
  Vector3 position;  // world
  Vector3 velocity;  // world
  Matrix jacobian;   // 3 x nv, velocity = jacobian * nu
};

std::vector<FootKinematics> foot_kinematics(const RigidBodyModel& model,
                                            const Vector& q, const Vector& nu);
std::vector<FootKinematics> foot_kinematics(const RigidBodyModel& model,
                                            const TreePoses& poses,
                                            const Vector& nu);

std::vector<Vector3> foot_positions(const RigidBodyModel& model,
                                    const Vector& q);

/// Solves M nudot = S^T tau + sum J_i^T lambda_i - C - G with a Cholesky
/// factorization. `foot_forces` holds world-frame forces, one per foot, or
/// is empty.
Vector forward_dynamics(const RigidBodyModel& model, const Vector& q,
                        const Vector& nu, const Vector& tau,
                        const std::vector<Vector3>& foot_forces);

/// Same as forward_dynamics with generalized forces already summed.
Vector forward_dynamics_generalized(const RigidBodyModel& model,
                                    const Vector& q, const Vector& nu,
                                    const Vector& generalized_force);

double kinetic_energy(const RigidBodyModel& model, const Vector& q,
                      const Vector& nu);
double potential_energy(const RigidBodyModel& model, const Vector& q);

/// World-frame centre of mass of the whole tree.
Vector3 center_of_mass(const RigidBodyModel& model, const Vector& q);

}  // namespace gaitopt
