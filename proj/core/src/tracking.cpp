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

#include "gaitopt/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gaitopt {
namespace {

void check_gain_matrix(const Matrix& m, int dims, const std::string& field) {
  if (m.rows() != dims || m.cols() != dims)
    throw ConfigError(field, "expected " + std::to_string(dims) + "x" +
                                 std::to_string(dims) + " matrix");
  if ((m.array() < 0.0).any()) throw ConfigError(field, "gains must be >= 0");
}

int base_dims(const RigidBodyModel& model) {
  switch (model.base_type()) {
    case BaseType::Fixed: return 0;
    case BaseType::Planar: return 3;
    case BaseType::Spatial: return 6;
  }
  return 0;
}

}  // namespace

void TrackingGains::validate(int actuated, int dims) const {
  if (joint_kp.size() != actuated) throw ConfigError("tracking.joint_kp", "one gain per actuated joint");
  if (joint_kd.size() != actuated) throw ConfigError("tracking.joint_kd", "one gain per actuated joint");
  if ((joint_kp.array() < 0.0).any()) throw ConfigError("tracking.joint_kp", "gains must be >= 0");
  if ((joint_kd.array() < 0.0).any()) throw ConfigError("tracking.joint_kd", "gains must be >= 0");
  check_gain_matrix(base_kp, dims, "tracking.base_kp");
  check_gain_matrix(base_kd, dims, "tracking.base_kd");
}

TrackingGains TrackingGains::zero(int actuated, int dims) {
  return {Vector::Zero(actuated), Vector::Zero(actuated), Matrix::Zero(dims, dims),
          Matrix::Zero(dims, dims)};
}

void PlantPerturbation::validate(int state_dim) const {
  if (!(mass_scale > 0.0)) throw ConfigError("perturbation.mass_scale", "must be > 0");
  if (!(contact_stiffness_scale > 0.0))
    throw ConfigError("perturbation.contact_stiffness_scale", "must be > 0");
  if (!(contact_damping_scale > 0.0))
    throw ConfigError("perturbation.contact_damping_scale", "must be > 0");
  if (initial_state_offset.size() != 0 && initial_state_offset.size() != state_dim)
    throw ConfigError("perturbation.initial_state_offset",
                      "expected dimension " + std::to_string(state_dim));
  if (!(torque_noise_std >= 0.0))
    throw ConfigError("perturbation.torque_noise_std", "must be >= 0");
}

void TrackingSettings::validate() const {
  if (!(control_rate > 0.0)) throw ConfigError("tracking.control_rate", "must be > 0");
  if (plant_substeps < 1) throw ConfigError("tracking.plant_substeps", "must be >= 1");
}

Vector joint_pd(const Vector& q_des, const Vector& qd_des, const Vector& q,
                const Vector& qd, const Vector& kp, const Vector& kd) {
  if (q_des.size() != q.size() || qd_des.size() != qd.size() ||
      kp.size() != q.size() || kd.size() != qd.size())
    throw std::invalid_argument("joint_pd: dimension mismatch");
  return kp.cwiseProduct(q_des - q) + kd.cwiseProduct(qd_des - qd);
}

Vector base_virtual_model(const Vector& pose_des, const Vector& pose,
                          const Vector& twist_des, const Vector& twist,
                          const Matrix& p_gain, const Matrix& d_gain,
                          int angular_dims) {
  Vector error = pose_des - pose;
  for (int i = error.size() - angular_dims; i < error.size(); ++i)
    error[i] = wrap_angle(error[i]);
  return p_gain * error + d_gain * (twist_des - twist);
}

WrenchDistribution wrench_to_torques(const RigidBodyModel& model,
                                     const Vector& wrench,
                                     const std::vector<FootKinematics>& stance,
                                     const Vector3& reference) {
  WrenchDistribution out;
  out.torques = Vector::Zero(model.num_actuated());
  if (stance.empty()) {
    out.no_stance = true;
    return out;
  }
  const bool planar = model.planar();
  const int k = static_cast<int>(stance.size());
  const int fd = planar ? 2 : 3;
  const int rows = planar ? 3 : 6;
  if (wrench.size() != rows) throw std::invalid_argument("wrench_to_torques: wrench dimension");

  Matrix g = Matrix::Zero(rows, fd * k);
  for (int i = 0; i < k; ++i) {
    const Vector3 r = stance[i].position - reference;
    if (planar) {
      // [f_x, f_z, tau_y], tau_y = r_z f_x - r_x f_z
      g(0, 2 * i) = 1.0;
      g(1, 2 * i + 1) = 1.0;
      g(2, 2 * i) = r.z();
      g(2, 2 * i + 1) = -r.x();
    } else {
      g.block<3, 3>(0, 3 * i).setIdentity();
      g.block<3, 3>(3, 3 * i) = skew(r);
    }
  }
  const Vector f = g.completeOrthogonalDecomposition().solve(wrench);

  const int nj = model.num_joints();
  Vector tau_joints = Vector::Zero(nj);
  for (int i = 0; i < k; ++i) {
    Vector3 force = Vector3::Zero();
    if (planar) {
      force.x() = f[2 * i];
      force.z() = f[2 * i + 1];
    } else {
      force = f.segment<3>(3 * i);
    }
    out.forces.push_back(force);
    tau_joints.noalias() -= stance[i].jacobian.rightCols(nj).transpose() * force;
  }
  const auto& actuated = model.actuated_joints();
  for (int a = 0; a < model.num_actuated(); ++a) out.torques[a] = tau_joints[actuated[a]];
  return out;
}

std::vector<bool> contact_detection(const std::vector<Vector3>& forces,
                                    const Vector3& normal, double threshold) {
  std::vector<bool> flags(forces.size());
  for (std::size_t i = 0; i < forces.size(); ++i)
    flags[i] = forces[i].dot(normal) > threshold;
  return flags;
}

GroundPlane ground_plane_fit(const std::vector<Vector3>& points, bool planar) {
  const std::size_t needed = planar ? 2 : 3;
  if (points.size() < needed)
    throw PlaneFitError("ground plane fit needs at least " + std::to_string(needed) +
                        " points");
  Vector3 centroid = Vector3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, (p - centroid).norm());
  if (scale == 0.0) throw PlaneFitError("ground plane fit: coincident points");

  GroundPlane plane;
  plane.point = centroid;
  if (planar) {
    Eigen::MatrixX2d centered(points.size(), 2);
    for (std::size_t i = 0; i < points.size(); ++i)
      centered.row(i) << points[i].x() - centroid.x(), points[i].z() - centroid.z();
    Eigen::JacobiSVD<Eigen::MatrixX2d> svd(centered, Eigen::ComputeFullV);
    if (svd.singularValues()[0] <= 1e-12 * scale)
      throw PlaneFitError("ground plane fit: coincident points");
    const Eigen::Vector2d n = svd.matrixV().col(1);
    plane.normal = Vector3(n.x(), 0.0, n.y());
  } else {
    Eigen::MatrixX3d centered(points.size(), 3);
    for (std::size_t i = 0; i < points.size(); ++i)
      centered.row(i) = (points[i] - centroid).transpose();
    Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered, Eigen::ComputeFullV);
    if (svd.singularValues()[1] <= 1e-9 * svd.singularValues()[0])
      throw PlaneFitError("ground plane fit: collinear points");
    plane.normal = svd.matrixV().col(2);
  }
  plane.normal.normalize();
  if (plane.normal.z() < 0.0) plane.normal = -plane.normal;
  if (plane.normal.z() <= 0.0) throw PlaneFitError("ground plane fit: vertical plane");
  return plane;
}

Vector base_pose(const RigidBodySystem& system, const Vector& x) {
  const RigidBodyModel& model = system.model();
  switch (model.base_type()) {
    case BaseType::Fixed: return Vector::Zero(0);
    case BaseType::Planar: return Vector3(x[1], x[2], x[0]);
    case BaseType::Spatial: {
      Vector pose(6);
      pose << x.segment<3>(3), x.segment<3>(0);
      return pose;
    }
  }
  return Vector::Zero(0);
}

Vector base_twist(const RigidBodySystem& system, const Vector& x) {
  const RigidBodyModel& model = system.model();
  const int nq = model.num_dofs();
  const Matrix3 r = base_rotation(model, x.head(nq));
  switch (model.base_type()) {
    case BaseType::Fixed: return Vector::Zero(0);
    case BaseType::Planar: {
      const Vector3 v = r * Vector3(x[nq + 1], 0.0, x[nq + 2]);
      return Vector3(v.x(), v.z(), x[nq]);
    }
    case BaseType::Spatial: {
      Vector twist(6);
      twist << r * x.segment<3>(nq + 3), r * x.segment<3>(nq);
      return twist;
    }
  }
  return Vector::Zero(0);
}

RigidBodySystem perturbed_plant(const RigidBodySystem& model,
                                const PlantPerturbation& perturbation) {
  perturbation.validate(model.state_dim());
  ContactParams contact = model.contact_params();
  contact.k_n *= perturbation.contact_stiffness_scale;
  contact.d_n *= perturbation.contact_damping_scale;
  return RigidBodySystem(model.model().scaled_masses(perturbation.mass_scale), contact,
                         model.plane());
}

double ExecutionLog::max_joint_error() const {
  double worst = 0.0;
  for (double e : joint_error) worst = std::max(worst, e);
  return worst;
}

double ExecutionLog::min_base_height(int height_index) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& x : states) lowest = std::min(lowest, x[height_index]);
  return lowest;
}

ExecutionLog simulate_closed_loop(const RigidBodySystem& plant,
                                  const StateInputTrajectory& nominal,
                                  const TrackingGains& gains,
                                  const PlantPerturbation& perturbation,
                                  const TrackingSettings& settings) {
  settings.validate();
  const RigidBodyModel& model = plant.model();
  const int n = plant.state_dim();
  const int m = plant.input_dim();
  const int nq = model.num_dofs();
  const int dims = base_dims(model);
  const int angular_dims = model.planar() ? 1 : 3;
  perturbation.validate(n);
  gains.validate(m, dims);
  const int horizon = nominal.horizon();
  if (horizon == 0 || nominal.states.front().size() != n || nominal.inputs.front().size() != m)
    throw std::invalid_argument("simulate_closed_loop: plant and solution dimensions differ");

  const StateLayout layout(model);
  const int substeps = settings.plant_substeps;
  Integrator integrator{settings.method, nominal.dt / substeps};
  const int decimation =
      std::max(1, static_cast<int>(std::lround(1.0 / (settings.control_rate * integrator.dt))));
  const double threshold =
      settings.contact_threshold >= 0.0
          ? settings.contact_threshold
          : 0.05 * model.total_mass() * model.gravity().norm() /
                std::max(1, model.num_feet());

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Vector x = nominal.states.front();
  if (perturbation.initial_state_offset.size() == n) x += perturbation.initial_state_offset;
  ContactState hidden = plant.initial_contact_state(x);

  const auto& actuated = model.actuated_joints();
  auto actuated_positions = [&](const Vector& s) {
    Vector out(m);
    for (int a = 0; a < m; ++a) out[a] = s[layout.joint_position(actuated[a])];
    return out;
  };
  auto actuated_velocities = [&](const Vector& s) {
    Vector out(m);
    for (int a = 0; a < m; ++a) out[a] = s[layout.joint_velocity(actuated[a])];
    return out;
  };

  ExecutionLog log;
  log.dt = integrator.dt;
  GroundPlane estimate = plant.plane();
  std::vector<std::optional<Vector3>> last_contact(model.num_feet());
  Vector feedback = Vector::Zero(m);

  const int steps = horizon * substeps;
  for (int i = 0; i <= steps; ++i) {
    const int k = std::min(i / substeps, horizon - 1);
    const double frac = i >= steps ? 1.0 : static_cast<double>(i % substeps) / substeps;
    const int k_state = std::min(i / substeps, horizon);
    Vector reference = nominal.states[k_state];
    if (frac > 0.0 && k_state < horizon)
      reference += frac * (nominal.states[k_state + 1] - nominal.states[k_state]);

    std::vector<Vector3> forces;
    for (const auto& f : plant.contact_forces(x, hidden)) forces.push_back(f.total());
    const std::vector<bool> stance = contact_detection(forces, estimate.normal, threshold);

    if (i % decimation == 0 && i < steps) {
      feedback = joint_pd(actuated_positions(reference), actuated_velocities(reference),
                          actuated_positions(x), actuated_velocities(x), gains.joint_kp,
                          gains.joint_kd);
      if (dims > 0) {
        const Vector wrench =
            base_virtual_model(base_pose(plant, reference), base_pose(plant, x),
                               base_twist(plant, reference), base_twist(plant, x),
                               gains.base_kp, gains.base_kd, angular_dims);
        const auto feet = foot_kinematics(model, x.head(nq), x.tail(nq));
        std::vector<FootKinematics> stance_feet;
        for (std::size_t f = 0; f < feet.size(); ++f)
          if (stance[f]) stance_feet.push_back(feet[f]);
        const Vector3 base_origin = compute_poses(model, x.head(nq)).base_position;
        feedback += wrench_to_torques(model, wrench, stance_feet, base_origin).torques;
      }
      if (perturbation.torque_noise_std > 0.0)
        for (int a = 0; a < m; ++a) feedback[a] += perturbation.torque_noise_std * noise(rng);
    }

    // Last contact point per foot, then a plane fit once every foot has one.
    if (model.num_feet() > 0) {
      const auto feet_pos = foot_positions(model, x.head(nq));
      bool all = true;
      for (std::size_t f = 0; f < feet_pos.size(); ++f) {
        if (stance[f]) last_contact[f] = feet_pos[f];
        all = all && last_contact[f].has_value();
      }
      if (all) {
        std::vector<Vector3> points;
        for (const auto& p : last_contact) points.push_back(*p);
        try {
          estimate = ground_plane_fit(points, model.planar());
        } catch (const PlaneFitError&) {
          // keep the previous estimate
        }
      }
    }

    const Vector& u_ff = nominal.inputs[k];
    const Vector tau = u_ff + feedback;

    log.time.push_back(i * integrator.dt);
    log.states.push_back(x);
    log.tau_ff.push_back(u_ff);
    log.tau_fb.push_back(feedback);
    log.tau_cmd.push_back(tau);
    log.forces.push_back(forces);
    log.stance.push_back(stance);
    log.estimated_plane.push_back(estimate);
    double joint_err = 0.0;
    for (int j = 0; j < model.num_joints(); ++j)
      joint_err = std::max(joint_err, std::abs(reference[layout.joint_position(j)] -
                                               x[layout.joint_position(j)]));
    log.joint_error.push_back(joint_err);
    log.base_error.push_back(
        layout.position > 0
            ? (reference.segment(layout.orientation, layout.position) -
               x.segment(layout.orientation, layout.position))
                  .norm()
            : 0.0);

    if (i == steps) break;
    try {
      StepResult next = step(plant, x, tau, hidden, integrator);
      x = std::move(next.state);
      hidden = std::move(next.contact);
    } catch (const DynamicsError& e) {
      log.diverged = true;
      log.divergence_index = i;
      log.divergence_message = e.what();
      break;
    }
  }
  return log;
}

}  // namespace gaitopt
