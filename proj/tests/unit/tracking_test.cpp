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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gaitopt/rigid_body.hpp"
#include "gaitopt/task.hpp"
#include "gaitopt/tracking.hpp"
#include "test_util.hpp"

namespace gaitopt {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vector quadruped_stance() {
  const RigidBodyModel model = testing::load_model("planar_quadruped");
  Vector q = Vector::Zero(model.num_dofs());
  q[2] = 0.4;
  for (int leg = 0; leg < 4; ++leg) {
    q[3 + 2 * leg] = 0.5;
    q[4 + 2 * leg] = -1.0;
  }
  return q;
}

TEST(WrenchDistribution, PlanarResidualAndTorques) {
  const RigidBodyModel model = testing::load_model("planar_quadruped");
  const Vector q = quadruped_stance();
  const auto feet = foot_kinematics(model, q, Vector::Zero(model.num_dofs()));
  const Vector3 reference(0.02, 0.0, 0.4);
  Vector wrench(3);
  wrench << 15.0, 160.0, -7.5;

  const WrenchDistribution d = wrench_to_torques(model, wrench, feet, reference);
  ASSERT_EQ(d.forces.size(), 4u);
  EXPECT_FALSE(d.no_stance);
  Vector3 force = Vector3::Zero();
  double torque = 0.0;
  for (std::size_t i = 0; i < feet.size(); ++i) {
    force += d.forces[i];
    const Vector3 r = feet[i].position - reference;
    torque += r.cross(d.forces[i]).y();
    EXPECT_EQ(d.forces[i].y(), 0.0);
  }
  EXPECT_NEAR(force.x(), 15.0, 1e-9);
  EXPECT_NEAR(force.z(), 160.0, 1e-9);
  EXPECT_NEAR(torque, -7.5, 1e-9);

  Vector expected = Vector::Zero(model.num_joints());
  for (std::size_t i = 0; i < feet.size(); ++i)
    expected -= feet[i].jacobian.rightCols(model.num_joints()).transpose() * d.forces[i];
  for (int a = 0; a < model.num_actuated(); ++a)
    EXPECT_NEAR(d.torques[a], expected[model.actuated_joints()[a]], 1e-9);
}

TEST(WrenchDistribution, SpatialResidual) {
  const RigidBodyModel model = testing::load_model("spatial_quadruped");
  std::mt19937_64 rng(3);
  Vector q = testing::random_positions(rng, model, 0.3);
  q[5] = 0.5;
  const auto feet = foot_kinematics(model, q, Vector::Zero(model.num_dofs()));
  std::vector<FootKinematics> stance(feet.begin(), feet.begin() + 3);
  const Vector3 reference(0.1, -0.05, 0.5);
  const Vector wrench = testing::random_vector(rng, 6, 50.0);

  const WrenchDistribution d = wrench_to_torques(model, wrench, stance, reference);
  Vector residual = -wrench;
  for (std::size_t i = 0; i < stance.size(); ++i) {
    residual.head<3>() += d.forces[i];
    residual.tail<3>() += (stance[i].position - reference).cross(d.forces[i]);
  }
  EXPECT_LT(residual.norm(), 1e-9);
}

TEST(WrenchDistribution, MinimumNorm) {
  // Two symmetric feet share a vertical force equally.
  const RigidBodyModel model = testing::load_model("planar_hopper");
  Vector q = Vector::Zero(model.num_dofs());
  q[3] = 0.6;
  q[4] = -1.2;
  const auto feet = foot_kinematics(model, q, Vector::Zero(model.num_dofs()));
  const Vector3 mid = 0.5 * (feet[0].position + feet[1].position);
  Vector wrench(3);
  wrench << 0.0, 100.0, 0.0;
  const WrenchDistribution d = wrench_to_torques(model, wrench, feet, mid);
  EXPECT_NEAR(d.forces[0].z(), 50.0, 1e-9);
  EXPECT_NEAR(d.forces[1].z(), 50.0, 1e-9);
}

TEST(WrenchDistribution, NoStanceGivesZero) {
  const RigidBodyModel model = testing::load_model("planar_hopper");
  Vector wrench(3);
  wrench << 1.0, 2.0, 3.0;
  const WrenchDistribution d = wrench_to_torques(model, wrench, {}, Vector3::Zero());
  EXPECT_TRUE(d.no_stance);
  EXPECT_EQ(d.torques, Vector::Zero(model.num_actuated()));
}

TEST(ContactDetection, ThresholdOnNormalComponent) {
  const Vector3 normal = Vector3(0.0, 0.0, 1.0);
  const auto flags = contact_detection(
      {Vector3(0, 0, 10.0), Vector3(50.0, 0, 4.9), Vector3(0, 0, 5.0), Vector3(0, 0, -20)},
      normal, 5.0);
  EXPECT_EQ(flags, (std::vector<bool>{true, false, false, false}));

  const Vector3 tilted = Vector3(std::sin(0.3), 0.0, std::cos(0.3));
  EXPECT_TRUE(contact_detection({6.0 * tilted}, tilted, 5.0).front());
}

TEST(GroundPlaneFit, RecoversSpatialPlane) {
  const Vector3 n = Vector3(0.1, -0.2, 1.0).normalized();
  const Vector3 p0(0.3, 0.1, -0.05);
  const Vector3 e1 = n.cross(Vector3::UnitX()).normalized();
  const Vector3 e2 = n.cross(e1);
  std::vector<Vector3> points;
  for (double a : {-0.4, 0.1, 0.5})
    for (double b : {-0.3, 0.25}) points.push_back(p0 + a * e1 + b * e2);
  const GroundPlane plane = ground_plane_fit(points, false);
  EXPECT_LT((plane.normal - n).norm(), 1e-12);
  EXPECT_NEAR((plane.point - p0).dot(n), 0.0, 1e-12);
}

TEST(GroundPlaneFit, RecoversPlanarLine) {
  const double slope = 0.15;
  std::vector<Vector3> points{Vector3(-0.3, 0.0, -0.3 * std::tan(slope)),
                              Vector3(0.4, 0.0, 0.4 * std::tan(slope))};
  const GroundPlane plane = ground_plane_fit(points, true);
  EXPECT_NEAR(plane.normal.x(), -std::sin(slope), 1e-12);
  EXPECT_NEAR(plane.normal.z(), std::cos(slope), 1e-12);
  EXPECT_EQ(plane.normal.y(), 0.0);
}

TEST(GroundPlaneFit, Errors) {
  EXPECT_THROW(ground_plane_fit({Vector3::Zero(), Vector3::UnitX()}, false), PlaneFitError);
  EXPECT_THROW(ground_plane_fit({Vector3::Zero()}, true), PlaneFitError);
  EXPECT_THROW(ground_plane_fit({Vector3::Ones(), Vector3::Ones(), Vector3::Ones()}, false),
               PlaneFitError);
  EXPECT_THROW(ground_plane_fit({Vector3::Zero(), Vector3::UnitX(), 2.0 * Vector3::UnitX()},
                                false),
               PlaneFitError);
  // Vertical wall in the sagittal plane.
  EXPECT_THROW(ground_plane_fit({Vector3::Zero(), Vector3::UnitZ()}, true), PlaneFitError);
}

TEST(Feedback, JointPd) {
  Vector q_des(2), qd_des(2), q(2), qd(2), kp(2), kd(2);
  q_des << 1.0, -1.0;
  qd_des << 0.0, 0.5;
  q << 0.8, -1.1;
  qd << 0.2, 0.5;
  kp << 100.0, 50.0;
  kd << 2.0, 3.0;
  const Vector tau = joint_pd(q_des, qd_des, q, qd, kp, kd);
  EXPECT_NEAR(tau[0], 100.0 * 0.2 - 2.0 * 0.2, 1e-12);
  EXPECT_NEAR(tau[1], 50.0 * 0.1, 1e-12);
  EXPECT_THROW(joint_pd(q_des, qd_des, q, qd, kp, Vector::Zero(3)), std::invalid_argument);
}

TEST(Feedback, VirtualModelWrapsAngles) {
  Vector pose_des(3), pose(3);
  pose_des << 0.0, 0.5, kPi - 0.05;
  pose << 0.0, 0.5, -kPi + 0.05;
  const Matrix kp = Matrix::Identity(3, 3) * 10.0;
  const Vector f = base_virtual_model(pose_des, pose, Vector::Zero(3), Vector::Zero(3), kp,
                                      Matrix::Zero(3, 3), 1);
  EXPECT_NEAR(f[2], -1.0, 1e-12);
  EXPECT_NEAR(f.head<2>().norm(), 0.0, 1e-12);
}

TEST(Tracking, PerturbedPlantScalesMassAndContact) {
  const TaskConfig config = load_task(testing::data_dir() / "tasks" / "closed-loop-hopper.json");
  PlantPerturbation p;
  p.mass_scale = 1.1;
  p.contact_stiffness_scale = 2.0;
  const RigidBodySystem plant = perturbed_plant(*config.rigid_body, p);
  EXPECT_NEAR(plant.model().total_mass(), 1.1 * config.rigid_body->model().total_mass(), 1e-12);
  EXPECT_EQ(plant.contact_params().k_n, 2.0 * config.contact.k_n);
  EXPECT_EQ(plant.contact_params().d_n, config.contact.d_n);
  p.mass_scale = 0.0;
  EXPECT_THROW(perturbed_plant(*config.rigid_body, p), ConfigError);
}

TEST(Tracking, ReplayOfOpenLoopRolloutOnNominalPlant) {
  // Feeding back against the plant's own rollout changes nothing.
  const TaskConfig config = load_task(testing::data_dir() / "tasks" / "closed-loop-hopper.json");
  AffineController ctrl = config.make_initial_controller();
  const StateInputTrajectory nominal =
      rollout(*config.system, ctrl, config.initial_state,
              config.solver.integrator);
  TrackingSettings settings;
  settings.control_rate = 1.0 / config.dt;
  const ExecutionLog log = simulate_closed_loop(
      *config.rigid_body, nominal, config.tracking->gains, PlantPerturbation{}, settings);
  ASSERT_FALSE(log.diverged) << log.divergence_message;
  ASSERT_EQ(log.states.size(), nominal.states.size());
  EXPECT_LT(log.max_joint_error(), 1e-9);
  EXPECT_LT((log.states.back() - nominal.states.back()).norm(), 1e-9);
}

TEST(Tracking, HeavierPlantIsCaughtByFeedback) {
  const TaskConfig config = load_task(testing::data_dir() / "tasks" / "closed-loop-hopper.json");
  AffineController ctrl = config.make_initial_controller();
  const StateInputTrajectory nominal =
      rollout(*config.system, ctrl, config.initial_state, config.solver.integrator);
  PlantPerturbation heavy;
  heavy.mass_scale = 1.1;

  const TrackingGains none = TrackingGains::zero(config.system->input_dim(), 3);
  const RigidBodySystem plant = perturbed_plant(*config.rigid_body, heavy);
  const ExecutionLog open =
      simulate_closed_loop(plant, nominal, none, heavy, config.tracking->settings);
  const ExecutionLog closed = simulate_closed_loop(plant, nominal, config.tracking->gains, heavy,
                                                   config.tracking->settings);
  ASSERT_FALSE(closed.diverged);
  EXPECT_LE(closed.max_joint_error(), open.max_joint_error());
}

}  // namespace
}  // namespace gaitopt
