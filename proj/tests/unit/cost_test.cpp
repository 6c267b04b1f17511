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
#include <numbers>
#include <random>

#include "gaitopt/cost.hpp"
#include "test_util.hpp"

namespace gaitopt {
namespace {

CostSpec simple_cost(int n, int m) {
  CostSpec c;
  c.final_weight = Matrix::Identity(n, n) * 3.0;
  c.state_weight = Matrix::Identity(n, n);
  c.input_weight = Matrix::Identity(m, m) * 0.1;
  c.state_reference = PiecewiseReference(Vector::Zero(n));
  c.input_reference = PiecewiseReference(Vector::Zero(m));
  return c;
}

TEST(WaypointWindow, NormalizedAndTruncated) {
  WaypointTerm w;
  w.time = 0.6;
  w.rho = 400.0;
  EXPECT_NEAR(w.window(0.6), std::sqrt(400.0 / (2 * std::numbers::pi)), 1e-12);
  double integral = 0.0;
  const double dt = 1e-4;
  for (double t = 0.0; t < 1.2; t += dt) integral += w.window(t) * dt;
  EXPECT_NEAR(integral, 1.0, 1e-6);
  const double edge = 6.0 / std::sqrt(w.rho);
  EXPECT_GT(w.window(0.6 + 0.999 * edge), 0.0);
  EXPECT_EQ(w.window(0.6 + 1.001 * edge), 0.0);
  EXPECT_EQ(w.window(0.6 - 1.001 * edge), 0.0);
}

TEST(PiecewiseReference, Segments) {
  PiecewiseReference r({0.0, 0.5, 1.0}, {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0),
                                          Vector::Constant(1, 3.0)});
  EXPECT_EQ(r.at(0.0)[0], 1.0);
  EXPECT_EQ(r.at(0.49)[0], 1.0);
  EXPECT_EQ(r.at(0.5)[0], 2.0);
  EXPECT_EQ(r.at(7.0)[0], 3.0);
  EXPECT_THROW(PiecewiseReference({0.0, 0.0}, {Vector::Zero(1), Vector::Zero(1)}), ConfigError);
}

TEST(Cost, HandComputedTrajectory) {
  CostSpec c = simple_cost(1, 1);
  StateInputTrajectory traj;
  traj.dt = 0.5;
  traj.states = {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0), Vector::Constant(1, -1.0)};
  traj.inputs = {Vector::Constant(1, 3.0), Vector::Constant(1, -2.0)};
  // 0.5 * (1 + 0.9) + 0.5 * (4 + 0.4) + 3 * 1
  EXPECT_NEAR(evaluate(c, traj), 0.95 + 2.2 + 3.0, 1e-14);
}

TEST(Cost, QuadratizationMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const int n = 4, m = 2;
  CostSpec c = simple_cost(n, m);
  Matrix q = testing::random_vector(rng, n * n).reshaped(n, n);
  c.state_weight = q * q.transpose();
  c.state_reference = PiecewiseReference(testing::random_vector(rng, n));
  c.input_reference = PiecewiseReference(testing::random_vector(rng, m));
  WaypointTerm w;
  w.time = 0.3;
  w.rho = 50.0;
  w.weight = Matrix::Identity(n, n) * 20.0;
  w.target = testing::random_vector(rng, n);
  c.waypoints.push_back(w);
  c.angle_indices = {0};
  const Vector x = testing::random_vector(rng, n);
  const Vector u = testing::random_vector(rng, m);
  const double t = 0.32, dt = 0.01;
  const QuadraticCostSlice s = quadratize(c, x, u, t, dt);
  EXPECT_NEAR(s.q, running_cost(c, x, u, t) * dt, 1e-14);
  const double h = 1e-6;
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (running_cost(c, xp, u, t) - running_cost(c, xm, u, t)) * dt / (2 * h);
    EXPECT_NEAR(s.q_vec[i], fd, 1e-7);
  }
  for (int i = 0; i < m; ++i) {
    Vector up = u, um = u;
    up[i] += h;
    um[i] -= h;
    const double fd = (running_cost(c, x, up, t) - running_cost(c, x, um, t)) * dt / (2 * h);
    EXPECT_NEAR(s.r_vec[i], fd, 1e-7);
  }
  EXPECT_LT((s.q_mat - 2 * dt * (c.state_weight + w.window(t) * w.weight)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.r_mat - 2 * dt * c.input_weight).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Cost, AngleDeviationWrapped) {
  CostSpec c = simple_cost(2, 1);
  c.state_reference = PiecewiseReference(Vector::Zero(2));
  c.angle_indices = {0};
  Vector x(2);
  x << 2 * std::numbers::pi - 0.1, 0.0;
  EXPECT_NEAR(running_cost(c, x, Vector::Zero(1), 0.0), 0.01, 1e-12);
  c.angle_indices.clear();
  EXPECT_GT(running_cost(c, x, Vector::Zero(1), 0.0), 30.0);
}

TEST(Cost, WaypointUsesItsOwnTarget) {
  CostSpec c = simple_cost(1, 1);
  c.state_weight.setZero();
  WaypointTerm w;
  w.time = 0.0;
  w.rho = 2 * std::numbers::pi;  // window(0) = 1
  w.weight = Matrix::Identity(1, 1);
  w.target = Vector::Constant(1, 0.8);
  c.waypoints.push_back(w);
  EXPECT_NEAR(running_cost(c, Vector::Constant(1, 0.8), Vector::Zero(1), 0.0), 0.0, 1e-15);
  EXPECT_NEAR(running_cost(c, Vector::Constant(1, 0.0), Vector::Zero(1), 0.0), 0.64, 1e-12);
}

TEST(Cost, Validation) {
  CostSpec c = simple_cost(2, 1);
  EXPECT_NO_THROW(c.validate(2, 1, 1.0));
  c.input_weight(0, 0) = 0.0;
  EXPECT_THROW(c.validate(2, 1, 1.0), ConfigError);
  c = simple_cost(2, 1);
  c.state_weight(0, 0) = -1.0;
  EXPECT_THROW(c.validate(2, 1, 1.0), ConfigError);
  c = simple_cost(2, 1);
  WaypointTerm w;
  w.time = 2.0;
  w.weight = Matrix::Identity(2, 2);
  w.target = Vector::Zero(2);
  c.waypoints.push_back(w);
  EXPECT_THROW(c.validate(2, 1, 1.0), ConfigError);
  EXPECT_THROW(simple_cost(3, 1).validate(2, 1, 1.0), ConfigError);
}

TEST(Cost, ScaledScalesEverything) {
  CostSpec c = simple_cost(1, 1);
  StateInputTrajectory traj;
  traj.dt = 0.1;
  traj.states = {Vector::Constant(1, 1.0), Vector::Constant(1, 0.5)};
  traj.inputs = {Vector::Constant(1, 2.0)};
  EXPECT_NEAR(evaluate(c.scaled(7.0), traj), 7.0 * evaluate(c, traj), 1e-13);
}

}  // namespace
}  // namespace gaitopt
