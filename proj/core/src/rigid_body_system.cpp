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

#include "gaitopt/rigid_body_system.hpp"

namespace gaitopt {

StateLayout::StateLayout(const RigidBodyModel& model) : joints(model.num_joints()) {
  switch (model.base_type()) {
    case BaseType::Fixed: break;
    case BaseType::Planar: orientation = 1; position = 2; break;
    case BaseType::Spatial: orientation = 3; position = 3; break;
  }
}

struct RigidBodySystem::MassTerms {
  TreePoses poses;
  std::vector<Matrix6> inertias;
  Eigen::LLT<Matrix> llt;
  std::vector<FootKinematics> feet;
};

RigidBodySystem::RigidBodySystem(RigidBodyModel model, ContactParams contact,
                                 GroundPlane plane)
    : model_(std::move(model)), contact_(contact), plane_(std::move(plane)) {
  contact_.validate();
  plane_.validate();
  if (model_.planar() && std::abs(plane_.normal.y()) > 1e-12)
    throw ConfigError("plane.normal", "planar models need a normal in the x-z plane");
}

Vector RigidBodySystem::contact_generalized_force(
    const std::vector<FootKinematics>& feet, const ContactState& hidden) const {
  Vector generalized = Vector::Zero(model_.num_dofs());
  for (std::size_t i = 0; i < feet.size(); ++i) {
    const FootForce force = foot_contact_force(feet[i].position, feet[i].velocity,
                                               hidden[i], plane_, contact_);
    if (force.normal.isZero(0.0) && force.tangential.isZero(0.0)) continue;
    generalized.noalias() += feet[i].jacobian.transpose() * force.total();
  }
  return generalized;
}

Vector RigidBodySystem::acceleration(const Vector& q, const Vector& nu,
                                     const Vector& u, const ContactState& hidden,
                                     MassTerms* keep) const {
  MassTerms local;
  MassTerms& terms = keep ? *keep : local;
  terms.poses = compute_poses(model_, q);
  terms.inertias = link_inertias(model_, terms.poses);
  terms.llt.compute(mass_matrix(model_, terms.poses, terms.inertias));
  if (terms.llt.info() != Eigen::Success)
    throw DynamicsError("mass matrix factorization failed");
  terms.feet = foot_kinematics(model_, terms.poses, nu);
  return acceleration_with(terms, nu, u, hidden);
}

Vector RigidBodySystem::acceleration_with(const MassTerms& terms,
                                          const Vector& nu, const Vector& u,
                                          const ContactState& hidden) const {
  const Vector zero = Vector::Zero(model_.num_dofs());
  Vector rhs = model_.selection_transpose() * u -
               inverse_dynamics(model_, terms.poses, terms.inertias, nu, zero);
  if (model_.num_feet() > 0) {
    std::vector<FootKinematics> feet = terms.feet;
    for (auto& foot : feet) foot.velocity = foot.jacobian * nu;
    rhs += contact_generalized_force(feet, hidden);
  }
  return terms.llt.solve(rhs);
}

Vector RigidBodySystem::derivative(const Vector& x, const Vector& u,
                                   const ContactState& hidden) const {
  const int nq = model_.num_dofs();
  const Vector q = x.head(nq);
  const Vector nu = x.tail(nq);
  Vector dx(2 * nq);
  dx.head(nq) = kinematic_map(model_, q) * nu;
  dx.tail(nq) = acceleration(q, nu, u, hidden, nullptr);
  return dx;
}

void RigidBodySystem::jacobians(const Vector& x, const Vector& u,
                                const ContactState& hidden, Matrix& a,
                                Matrix& b) const {
  const int nq = model_.num_dofs();
  const int n = 2 * nq;
  const Vector q = x.head(nq);
  const Vector nu = x.tail(nq);

  a.setZero(n, n);
  b.setZero(n, input_dim());
  a.topLeftCorner(nq, nq) = kinematic_map_derivative(model_, q, nu);
  a.topRightCorner(nq, nq) = kinematic_map(model_, q);

  MassTerms terms;
  acceleration(q, nu, u, hidden, &terms);

  Vector qp = q, qm = q;
  for (int i = 0; i < nq; ++i) {
    const double h = fd_step(q[i]);
    qp[i] = q[i] + h;
    qm[i] = q[i] - h;
    a.block(nq, i, nq, 1) = (acceleration(qp, nu, u, hidden, nullptr) -
                             acceleration(qm, nu, u, hidden, nullptr)) /
                            (2.0 * h);
    qp[i] = qm[i] = q[i];
  }
  // Velocity perturbations leave M(q) and the foot Jacobians unchanged.
  Vector vp = nu, vm = nu;
  for (int i = 0; i < nq; ++i) {
    const double h = fd_step(nu[i]);
    vp[i] = nu[i] + h;
    vm[i] = nu[i] - h;
    a.block(nq, nq + i, nq, 1) = (acceleration_with(terms, vp, u, hidden) -
                                  acceleration_with(terms, vm, u, hidden)) /
                                 (2.0 * h);
    vp[i] = vm[i] = nu[i];
  }
  b.bottomRows(nq) = terms.llt.solve(model_.selection_transpose());
}

ContactState RigidBodySystem::update_contact_state(const ContactState& hidden,
                                                   const Vector& x) const {
  const std::vector<Vector3> feet = foot_positions(model_, x.head(model_.num_dofs()));
  ContactState next(feet.size());
  for (std::size_t i = 0; i < feet.size(); ++i)
    next[i] = gaitopt::update_contact_state(
        i < hidden.size() ? hidden[i] : FootContact{}, feet[i], plane_);
  return next;
}

std::vector<int> RigidBodySystem::angle_indices() const {
  std::vector<int> out;
  for (int i = 0; i < StateLayout(model_).orientation; ++i) out.push_back(i);
  return out;
}

std::vector<FootForce> RigidBodySystem::contact_forces(
    const Vector& x, const ContactState& hidden) const {
  const int nq = model_.num_dofs();
  const auto feet = foot_kinematics(model_, x.head(nq), x.tail(nq));
  std::vector<FootForce> out;
  for (std::size_t i = 0; i < feet.size(); ++i)
    out.push_back(foot_contact_force(feet[i].position, feet[i].velocity,
                                     hidden[i], plane_, contact_));
  return out;
}

Matrix RigidBodySystem::pd_hold_gain() const {
  const StateLayout layout(model_);
  Matrix k = Matrix::Zero(input_dim(), state_dim());
  const auto& actuated = model_.actuated_joints();
  for (int a = 0; a < static_cast<int>(actuated.size()); ++a) {
    const int j = actuated[a];
    k(a, layout.joint_position(j)) = -model_.pd_hold().kp[j];
    k(a, layout.joint_velocity(j)) = -model_.pd_hold().kd[j];
  }
  return k;
}

AffineController RigidBodySystem::pd_hold_controller(const Vector& x0,
                                                     int horizon) const {
  AffineController c;
  c.feedforward.assign(horizon, Vector::Zero(input_dim()));
  c.gain.assign(horizon, pd_hold_gain());
  c.reference.assign(horizon, x0);
  return c;
}

}  // namespace gaitopt
