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

#include "gaitopt/contact.hpp"
#include "gaitopt/rigid_body.hpp"
#include "gaitopt/rigid_body_model.hpp"
#include "gaitopt/system.hpp"

namespace gaitopt {

/// Index helper for x = [q_W; nu_L] of a rigid-body system.
struct StateLayout {
  int orientation = 0;  // number of orientation coordinates (0, 1 or 3)
  int position = 0;     // number of base position coordinates (0, 2 or 3)
  int joints = 0;

  explicit StateLayout(const RigidBodyModel& model);

  int dofs() const { return orientation + position + joints; }
  int size() const { return 2 * dofs(); }
  int joint_position(int j) const { return orientation + position + j; }
  int joint_velocity(int j) const { return dofs() + orientation + position + j; }
  /// Index of the vertical base coordinate, or -1 for fixed bases.
  int base_height() const { return position == 0 ? -1 : orientation + position - 1; }
  int base_x() const { return position == 0 ? -1 : orientation; }
};

/// Rigid-body tree with smooth ground contact at its feet:
///   qdot  = T(q) nu
///   nudot = M^-1 (S^T tau + sum J_i^T lambda_i - C - G)
class RigidBodySystem final : public System {
 public:
  RigidBodySystem(RigidBodyModel model, ContactParams contact,
                  GroundPlane plane);

  int state_dim() const override { return 2 * model_.num_dofs(); }
  int input_dim() const override { return model_.num_actuated(); }
  int num_feet() const override { return model_.num_feet(); }

  Vector derivative(const Vector& x, const Vector& u,
                    const ContactState& hidden) const override;

  /// Kinematic rows analytic (including dR_WL/dq), acceleration rows by
  /// central differences in x, input columns analytic (M^-1 S^T).
  void jacobians(const Vector& x, const Vector& u, const ContactState& hidden,
                 Matrix& a, Matrix& b) const override;

  ContactState update_contact_state(const ContactState& hidden,
                                    const Vector& x) const override;

  std::vector<int> angle_indices() const override;
  std::string name() const override { return model_.name(); }

  const RigidBodyModel& model() const { return model_; }
  const ContactParams& contact_params() const { return contact_; }
  const GroundPlane& plane() const { return plane_; }
  StateLayout layout() const { return StateLayout(model_); }

  Vector positions(const Vector& x) const { return x.head(model_.num_dofs()); }
  Vector velocities(const Vector& x) const { return x.tail(model_.num_dofs()); }

  std::vector<FootForce> contact_forces(const Vector& x,
                                        const ContactState& hidden) const;

  /// Per-joint PD hold around `x0` in the controller form used by rollouts.
  AffineController pd_hold_controller(const Vector& x0, int horizon) const;
  Matrix pd_hold_gain() const;

 private:
  struct MassTerms;
  Vector acceleration(const Vector& q, const Vector& nu, const Vector& u,
                      const ContactState& hidden, MassTerms* keep) const;
  Vector acceleration_with(const MassTerms& terms, const Vector& nu,
                           const Vector& u, const ContactState& hidden) const;
  Vector contact_generalized_force(const std::vector<FootKinematics>& feet,
                                   const ContactState& hidden) const;

  RigidBodyModel model_;
  ContactParams contact_;
  GroundPlane plane_;
};

}  // namespace gaitopt
