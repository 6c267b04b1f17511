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

#include "gaitopt/rigid_body.hpp"

#include <cmath>
#include <numbers>

namespace gaitopt {
namespace {

// Motion cross product v x m for [angular; linear] vectors.
Vector6 cross_motion(const Vector6& v, const Vector6& m) {
  Vector6 out;
  out.head<3>() = v.head<3>().cross(m.head<3>());
  out.tail<3>() = v.head<3>().cross(m.tail<3>()) + v.tail<3>().cross(m.head<3>());
  return out;
}

// Force cross product v x* f.
Vector6 cross_force(const Vector6& v, const Vector6& f) {
  Vector6 out;
  out.head<3>() = v.head<3>().cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = v.head<3>().cross(f.tail<3>());
  return out;
}

Matrix6 spatial_inertia(const Link& link, const Matrix3& rotation,
                        const Vector3& origin) {
  const Vector3 c = origin + rotation * link.com;
  const Matrix3 cx = skew(c);
  Matrix6 inertia;
  inertia.topLeftCorner<3, 3>() =
      rotation * link.inertia * rotation.transpose() - link.mass * cx * cx;
  inertia.topRightCorner<3, 3>() = link.mass * cx;
  inertia.bottomLeftCorner<3, 3>() = -link.mass * cx;
  inertia.bottomRightCorner<3, 3>() = link.mass * Matrix3::Identity();
  return inertia;
}

Vector3 point_velocity(const Vector6& motion, const Vector3& point) {
  return motion.tail<3>() + motion.head<3>().cross(point);
}

void check_dims(const RigidBodyModel& model, const Vector& q) {
  if (q.size() != model.num_dofs())
    throw std::invalid_argument("generalized coordinate dimension mismatch");
}

}  // namespace

Matrix3 base_rotation(const RigidBodyModel& model, const Vector& q) {
  switch (model.base_type()) {
    case BaseType::Fixed:
      return Matrix3::Identity();
    case BaseType::Planar:
      return Eigen::AngleAxisd(q[0], Vector3::UnitY()).toRotationMatrix();
    case BaseType::Spatial:
      return rotation_from_rpy(q[0], q[1], q[2]);
  }
  return Matrix3::Identity();
}

void check_gimbal_lock(const RigidBodyModel& model, const Vector& q) {
  if (model.base_type() != BaseType::Spatial) return;
  const double distance = std::numbers::pi / 2.0 - std::abs(wrap_angle(q[1]));
  if (std::abs(distance) < 1e-3)
    throw DynamicsError("base pitch within 1e-3 rad of the Euler singularity");
}

TreePoses compute_poses(const RigidBodyModel& model, const Vector& q) {
  check_dims(model, q);
  const int nb = model.num_base_dofs();
  const auto& links = model.links();
  const auto& joints = model.joints();

  TreePoses poses;
  poses.base_rotation = base_rotation(model, q);
  if (model.base_type() == BaseType::Planar)
    poses.base_position = Vector3(q[1], 0.0, q[2]);
  else if (model.base_type() == BaseType::Spatial)
    poses.base_position = q.segment<3>(3);

  poses.rotation.resize(links.size());
  poses.position.resize(links.size());
  poses.subspace.resize(joints.size());
  poses.rotation[0].setIdentity();
  poses.position[0].setZero();
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const Joint& joint = joints[k];
    const Matrix3 frame = poses.rotation[joint.parent] * joint.origin_rotation;
    const Vector3 origin = poses.position[joint.parent] +
                           poses.rotation[joint.parent] * joint.origin_position;
    const Vector3 axis = frame * joint.axis;
    const double value = q[nb + static_cast<int>(k)];
    Vector6& s = poses.subspace[k];
    if (joint.type == JointType::Revolute) {
      poses.rotation[joint.child] =
          frame * Eigen::AngleAxisd(value, joint.axis).toRotationMatrix();
      poses.position[joint.child] = origin;
      s << axis, origin.cross(axis);
    } else {
      poses.rotation[joint.child] = frame;
      poses.position[joint.child] = origin + axis * value;
      s << Vector3::Zero(), axis;
    }
  }
  return poses;
}

Matrix kinematic_map(const RigidBodyModel& model, const Vector& q) {
  const int n = model.num_dofs();
  Matrix t = Matrix::Identity(n, n);
  if (model.base_type() == BaseType::Planar) {
    const double c = std::cos(q[0]);
    const double s = std::sin(q[0]);
    t.block<2, 2>(1, 1) << c, s, -s, c;
  } else if (model.base_type() == BaseType::Spatial) {
    check_gimbal_lock(model, q);
    const double sr = std::sin(q[0]), cr = std::cos(q[0]);
    const double tp = std::tan(q[1]), cp = std::cos(q[1]);
    t.block<3, 3>(0, 0) << 1.0, sr * tp, cr * tp,
                           0.0, cr, -sr,
                           0.0, sr / cp, cr / cp;
    t.block<3, 3>(3, 3) = base_rotation(model, q);
  }
  return t;
}

Matrix kinematic_map_derivative(const RigidBodyModel& model, const Vector& q,
                                const Vector& nu) {
  const int n = model.num_dofs();
  Matrix d = Matrix::Zero(n, n);
  if (model.base_type() == BaseType::Planar) {
    const double c = std::cos(q[0]);
    const double s = std::sin(q[0]);
    d(1, 0) = -s * nu[1] + c * nu[2];
    d(2, 0) = -c * nu[1] - s * nu[2];
  } else if (model.base_type() == BaseType::Spatial) {
    check_gimbal_lock(model, q);
    const double sr = std::sin(q[0]), cr = std::cos(q[0]);
    const double sp = std::sin(q[1]), cp = std::cos(q[1]);
    const double tp = sp / cp, cp2 = cp * cp;
    const Vector3 w = nu.head<3>();
    const Vector3 v = nu.segment<3>(3);

    Matrix3 d_roll;
    d_roll << 0.0, cr * tp, -sr * tp,
              0.0, -sr, -cr,
              0.0, cr / cp, -sr / cp;
    Matrix3 d_pitch;
    d_pitch << 0.0, sr / cp2, cr / cp2,
               0.0, 0.0, 0.0,
               0.0, sr * sp / cp2, cr * sp / cp2;
    d.block<3, 1>(0, 0) = d_roll * w;
    d.block<3, 1>(0, 1) = d_pitch * w;

    const Matrix3 rz = Eigen::AngleAxisd(q[2], Vector3::UnitZ()).toRotationMatrix();
    const Matrix3 ry = Eigen::AngleAxisd(q[1], Vector3::UnitY()).toRotationMatrix();
    const Matrix3 rx = Eigen::AngleAxisd(q[0], Vector3::UnitX()).toRotationMatrix();
    d.block<3, 1>(3, 0) = rz * ry * rx * skew(Vector3::UnitX()) * v;
    d.block<3, 1>(3, 1) = rz * ry * skew(Vector3::UnitY()) * rx * v;
    d.block<3, 1>(3, 2) = skew(Vector3::UnitZ()) * rz * ry * rx * v;
  }
  return d;
}

std::vector<Matrix6> link_inertias(const RigidBodyModel& model,
                                   const TreePoses& poses) {
  std::vector<Matrix6> out(model.links().size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = spatial_inertia(model.links()[i], poses.rotation[i], poses.position[i]);
  return out;
}

Matrix mass_matrix(const RigidBodyModel& model, const Vector& q) {
  const TreePoses poses = compute_poses(model, q);
  return mass_matrix(model, poses, link_inertias(model, poses));
}

Matrix mass_matrix(const RigidBodyModel& model, const TreePoses& poses,
                   const std::vector<Matrix6>& inertias) {
  const auto& joints = model.joints();
  const int nb = model.num_base_dofs();
  const int n = model.num_dofs();

  std::vector<Matrix6> composite = inertias;
  for (int k = static_cast<int>(joints.size()) - 1; k >= 0; --k)
    composite[joints[k].parent] += composite[joints[k].child];

  Matrix m = Matrix::Zero(n, n);
  const auto& sb = model.base_subspace();
  if (nb > 0) m.topLeftCorner(nb, nb) = sb.transpose() * composite[0] * sb;

  for (int k = 0; k < static_cast<int>(joints.size()); ++k) {
    const Vector6 force = composite[joints[k].child] * poses.subspace[k];
    m(nb + k, nb + k) = poses.subspace[k].dot(force);
    int link = joints[k].parent;
    while (link != 0) {
      const int j = link - 1;  // joint moving `link`
      m(nb + k, nb + j) = m(nb + j, nb + k) = poses.subspace[j].dot(force);
      link = joints[j].parent;
    }
    if (nb > 0) {
      const Vector base_col = sb.transpose() * force;
      m.block(0, nb + k, nb, 1) = base_col;
      m.block(nb + k, 0, 1, nb) = base_col.transpose();
    }
  }
  return m;
}

Vector inverse_dynamics(const RigidBodyModel& model, const Vector& q,
                        const Vector& nu, const Vector& nudot,
                        bool with_gravity) {
  const TreePoses poses = compute_poses(model, q);
  return inverse_dynamics(model, poses, link_inertias(model, poses), nu, nudot,
                          with_gravity);
}

Vector inverse_dynamics(const RigidBodyModel& model, const TreePoses& poses,
                        const std::vector<Matrix6>& inertias, const Vector& nu,
                        const Vector& nudot, bool with_gravity) {
  const auto& links = model.links();
  const auto& joints = model.joints();
  const int nb = model.num_base_dofs();
  const auto& sb = model.base_subspace();

  std::vector<Vector6> vel(links.size()), acc(links.size()), force(links.size());
  vel[0] = sb * nu.head(nb);
  acc[0] = sb * nudot.head(nb);
  if (with_gravity)
    acc[0].tail<3>() -= poses.base_rotation.transpose() * model.gravity();

  for (std::size_t k = 0; k < joints.size(); ++k) {
    const int c = joints[k].child;
    const int p = joints[k].parent;
    const double qd = nu[nb + static_cast<int>(k)];
    const double qdd = nudot[nb + static_cast<int>(k)];
    const Vector6& s = poses.subspace[k];
    vel[c] = vel[p] + s * qd;
    acc[c] = acc[p] + s * qdd + cross_motion(vel[c], s) * qd;
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Vector6 momentum = inertias[i] * vel[i];
    force[i] = inertias[i] * acc[i] + cross_force(vel[i], momentum);
  }

  Vector tau(model.num_dofs());
  for (int k = static_cast<int>(joints.size()) - 1; k >= 0; --k) {
    tau[nb + k] = poses.subspace[k].dot(force[joints[k].child]);
    force[joints[k].parent] += force[joints[k].child];
  }
  if (nb > 0) tau.head(nb) = sb.transpose() * force[0];
  return tau;
}

Vector bias_forces(const RigidBodyModel& model, const Vector& q,
                   const Vector& nu) {
  return inverse_dynamics(model, q, nu, Vector::Zero(model.num_dofs()), true);
}

std::vector<FootKinematics> foot_kinematics(const RigidBodyModel& model,
                                            const Vector& q, const Vector& nu) {
  return foot_kinematics(model, compute_poses(model, q), nu);
}

std::vector<FootKinematics> foot_kinematics(const RigidBodyModel& model,
                                            const TreePoses& poses,
                                            const Vector& nu) {
  const auto& joints = model.joints();
  const int nb = model.num_base_dofs();
  const int n = model.num_dofs();
  const auto& sb = model.base_subspace();

  std::vector<FootKinematics> result;
  result.reserve(model.feet().size());
  for (const Foot& foot : model.feet()) {
    const Vector3 point =
        poses.position[foot.link] + poses.rotation[foot.link] * foot.offset;
    Matrix jac = Matrix::Zero(3, n);
    for (int b = 0; b < nb; ++b)
      jac.col(b) = point_velocity(sb.col(b), point);
    int link = foot.link;
    while (link != 0) {
      const int j = link - 1;
      jac.col(nb + j) = point_velocity(poses.subspace[j], point);
      link = joints[j].parent;
    }
    FootKinematics fk;
    fk.jacobian = poses.base_rotation * jac;
    fk.position = poses.base_position + poses.base_rotation * point;
    fk.velocity = fk.jacobian * nu;
    result.push_back(std::move(fk));
  }
  return result;
}

std::vector<Vector3> foot_positions(const RigidBodyModel& model,
                                    const Vector& q) {
  const TreePoses poses = compute_poses(model, q);
  std::vector<Vector3> out;
  for (const Foot& foot : model.feet())
    out.push_back(poses.base_position +
                  poses.base_rotation * (poses.position[foot.link] +
                                         poses.rotation[foot.link] * foot.offset));
  return out;
}

Vector forward_dynamics_generalized(const RigidBodyModel& model,
                                    const Vector& q, const Vector& nu,
                                    const Vector& generalized_force) {
  const Matrix m = mass_matrix(model, q);
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw DynamicsError("mass matrix factorization failed");
  return llt.solve(generalized_force - bias_forces(model, q, nu));
}

Vector forward_dynamics(const RigidBodyModel& model, const Vector& q,
                        const Vector& nu, const Vector& tau,
                        const std::vector<Vector3>& foot_forces) {
  Vector generalized = model.selection_transpose() * tau;
  if (!foot_forces.empty()) {
    if (foot_forces.size() != model.feet().size())
      throw std::invalid_argument("one force per foot expected");
    const auto feet = foot_kinematics(model, q, nu);
    for (std::size_t i = 0; i < feet.size(); ++i)
      generalized += feet[i].jacobian.transpose() * foot_forces[i];
  }
  return forward_dynamics_generalized(model, q, nu, generalized);
}

double kinetic_energy(const RigidBodyModel& model, const Vector& q,
                      const Vector& nu) {
  return 0.5 * nu.dot(mass_matrix(model, q) * nu);
}

double potential_energy(const RigidBodyModel& model, const Vector& q) {
  const TreePoses poses = compute_poses(model, q);
  double energy = 0.0;
  for (std::size_t i = 0; i < model.links().size(); ++i) {
    const Link& link = model.links()[i];
    const Vector3 com = poses.base_position +
                        poses.base_rotation *
                            (poses.position[i] + poses.rotation[i] * link.com);
    energy -= link.mass * model.gravity().dot(com);
  }
  return energy;
}

Vector3 center_of_mass(const RigidBodyModel& model, const Vector& q) {
  const TreePoses poses = compute_poses(model, q);
  Vector3 weighted = Vector3::Zero();
  for (std::size_t i = 0; i < model.links().size(); ++i) {
    const Link& link = model.links()[i];
    weighted += link.mass * (poses.base_position +
                             poses.base_rotation *
                                 (poses.position[i] + poses.rotation[i] * link.com));
  }
  return weighted / model.total_mass();
}

}  // namespace gaitopt
