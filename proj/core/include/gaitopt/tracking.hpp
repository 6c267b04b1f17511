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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gaitopt/common.hpp"
#include "gaitopt/contact.hpp"
#include "gaitopt/rigid_body.hpp"
#include "gaitopt/rigid_body_system.hpp"
#include "gaitopt/system.hpp"

namespace gaitopt {

/// Joint PD gains (one per actuated joint) and base task-space gains.
/// Base gains act on [position; orientation] errors and produce
/// [force; torque]: 6x6 for spatial bases, 3x3 ([x, z, pitch]) for planar.
struct TrackingGains {
  Vector joint_kp;
  Vector joint_kd;
  Matrix base_kp;
  Matrix base_kd;

  void validate(int actuated, int base_dims) const;
  static TrackingGains zero(int actuated, int base_dims);
};

struct PlantPerturbation {
  double mass_scale = 1.0;           // links' masses and inertias
  double contact_stiffness_scale = 1.0;  // k_n
  double contact_damping_scale = 1.0;    // d_n
  Vector initial_state_offset;       // empty = none
  double torque_noise_std = 0.0;     // N m, per actuated joint

  void validate(int state_dim) const;
};

/// kp .* (q_des - q) + kd .* (qd_des - qd)
Vector joint_pd(const Vector& q_des, const Vector& qd_des, const Vector& q,
                const Vector& qd, const Vector& kp, const Vector& kd);

/// Task-space PD on the base, F = P (x* - x) + D (xd* - xd). Poses are
/// [position; orientation angles] and twists [linear; angular], all in
/// world coordinates; the trailing `angular_dims` pose errors are wrapped
/// to (-pi, pi]. No gravity feedforward.
Vector base_virtual_model(const Vector& pose_des, const Vector& pose,
                          const Vector& twist_des, const Vector& twist,
                          const Matrix& p_gain, const Matrix& d_gain,
                          int angular_dims);

struct WrenchDistribution {
  Vector torques;               // per actuated joint
  std::vector<Vector3> forces;  // per stance foot, world frame
  bool no_stance = false;
};

/// Distributes a base wrench [force; torque] (planar: [f_x, f_z, tau_y])
/// over the stance feet by minimum-norm least squares so that
///   sum f_i = force,  sum (p_i - reference) x f_i = torque,
/// then maps the forces to joint torques. The f_i are ground reaction
/// forces on the robot; the legs realize them with tau = -J_joints^T f_i.
WrenchDistribution wrench_to_torques(const RigidBodyModel& model,
                                     const Vector& wrench,
                                     const std::vector<FootKinematics>& stance,
                                     const Vector3& reference);

/// flag_i = force_i . normal > threshold
std::vector<bool> contact_detection(const std::vector<Vector3>& forces,
                                    const Vector3& normal, double threshold);

class PlaneFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares plane through the points with an upward normal. Planar
/// fits use the x-z coordinates only and need two distinct points; spatial
/// fits need three non-collinear points. Throws PlaneFitError otherwise.
GroundPlane ground_plane_fit(const std::vector<Vector3>& points, bool planar);

/// World-frame base pose [position; angles] and twist [linear; angular],
/// reduced to [x, z, pitch] for planar bases. Empty for fixed bases.
Vector base_pose(const RigidBodySystem& system, const Vector& x);
Vector base_twist(const RigidBodySystem& system, const Vector& x);

RigidBodySystem perturbed_plant(const RigidBodySystem& model,
                                const PlantPerturbation& perturbation);

struct TrackingSettings {
  double control_rate = 200.0;      // Hz
  int plant_substeps = 1;           // plant steps per solution step
  /// Stance threshold on the normal force, N. Negative selects 5 % of the
  /// standing weight per foot.
  double contact_threshold = -1.0;
  std::uint64_t seed = 0;
  IntegratorMethod method = IntegratorMethod::Rk4;

  void validate() const;
};

struct ExecutionLog {
  double dt = 0.0;  // plant step
  std::vector<double> time;
  std::vector<Vector> states;
  std::vector<Vector> tau_cmd;
  std::vector<Vector> tau_ff;
  std::vector<Vector> tau_fb;
  std::vector<std::vector<Vector3>> forces;
  std::vector<std::vector<bool>> stance;
  std::vector<double> joint_error;  // max |q_des - q| over joints, rad
  std::vector<double> base_error;   // |position error|, m
  std::vector<GroundPlane> estimated_plane;
  bool diverged = false;
  int divergence_index = -1;
  std::string divergence_message;

  double max_joint_error() const;
  double min_base_height(int height_index) const;
};

/// Replays `nominal` on `plant`: at each control update
///   tau = u_ff(t) + joint_pd(...) + wrench_to_torques(base_virtual_model(...))
/// with the feedback part held between updates and u_ff applied every
/// plant step. The optimized feedback gains are not used. Divergence of the
/// plant is recorded in the log, not thrown.
ExecutionLog simulate_closed_loop(const RigidBodySystem& plant,
                                  const StateInputTrajectory& nominal,
                                  const TrackingGains& gains,
                                  const PlantPerturbation& perturbation,
                                  const TrackingSettings& settings);

}  // namespace gaitopt
