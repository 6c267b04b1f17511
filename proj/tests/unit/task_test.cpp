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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gaitopt/task.hpp"
#include "test_util.hpp"

namespace gaitopt {
namespace {

using json = nlohmann::json;

std::filesystem::path tasks_dir() { return testing::data_dir() / "tasks"; }

json hopper_task() {
  return json::parse(R"({
    "name": "t",
    "model": "../models/planar_hopper.json",
    "t_f": 0.2, "dt": 0.01,
    "initial_state": {"from": "zero", "z": 0.5, "hip": 0.6, "knee": -1.2},
    "cost": {"R": 0.01}
  })");
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void expect_config_error(const json& j, const std::string& field) {
  try {
    parse_task(j, tasks_dir());
    ADD_FAILURE() << "no error for " << field;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

TEST(TaskConfig, ParsesMinimalTask) {
  const TaskConfig c = parse_task(hopper_task(), tasks_dir());
  EXPECT_EQ(c.horizon(), 20);
  EXPECT_EQ(c.system->state_dim(), 10);
  EXPECT_EQ(c.initial_state[2], 0.5);
  EXPECT_EQ(c.initial_state[4], -1.2);
  EXPECT_EQ(c.cost.input_weight, Matrix::Identity(2, 2) * 0.01);
  EXPECT_EQ(c.cost.state_reference.at(0.1), c.initial_state);
}

TEST(TaskConfig, CoordinateNames) {
  const TaskConfig c = parse_task(hopper_task(), tasks_dir());
  EXPECT_EQ(coordinate_names(*c.system),
            (std::vector<std::string>{"pitch", "x", "z", "hip", "knee", "wy", "vx", "vz",
                                      "hip_dot", "knee_dot"}));
  EXPECT_EQ(input_names(*c.system), (std::vector<std::string>{"hip", "knee"}));
}

TEST(TaskConfig, WeightPriority) {
  json j = hopper_task();
  j["cost"]["Q"] = {{"default", 1.0}, {"joint_positions", 2.0}, {"*_dot", 3.0}, {"knee_dot", 4.0},
                    {"hip", 5.0}};
  const TaskConfig c = parse_task(j, tasks_dir());
  const Vector d = c.cost.state_weight.diagonal();
  Vector expected(10);
  expected << 1, 1, 1, 5, 2, 1, 1, 1, 3, 4;
  EXPECT_EQ(d, expected);
}

TEST(TaskConfig, FeetOnGroundPlacesLowestFoot) {
  json j = hopper_task();
  j["initial_state"]["feet_on_ground"] = 0.002;
  const TaskConfig c = parse_task(j, tasks_dir());
  const auto feet = foot_positions(c.rigid_body->model(), c.initial_state.head(5));
  double lowest = 1e9;
  for (const auto& p : feet) lowest = std::min(lowest, p.z());
  EXPECT_NEAR(lowest, -0.002, 1e-12);
}

TEST(TaskConfig, Errors) {
  json j = hopper_task();
  j["dt"] = 0.03;
  expect_config_error(j, "dt");
  j = hopper_task();
  j.erase("t_f");
  expect_config_error(j, "t_f");
  j = hopper_task();
  j["model"] = "../models/nope.json";
  expect_config_error(j, "model");
  j = hopper_task();
  j["contact"] = {{"k_n", -1.0}};
  expect_config_error(j, "k_n");
  j = hopper_task();
  j["cost"]["Q"] = {{"elbow", 1.0}};
  expect_config_error(j, "cost.Q");
  j = hopper_task();
  j["cost"]["Q"] = {{"default", -1.0}};
  expect_config_error(j, "cost.Q");
  j = hopper_task();
  j["cost"]["waypoints"] = json::array({{{"t", 0.1}, {"rho", 10}, {"W", 1.0}}});
  expect_config_error(j, "waypoints[0].x");
  j = hopper_task();
  j["initial_controller"] = "lqr";
  expect_config_error(j, "initial_controller");
  j = hopper_task();
  j["solver"] = {{"alpha_d", 1.0}};
  expect_config_error(j, "alpha_d");
  j = hopper_task();
  j["initial_state"] = json::array({1.0, 2.0});
  expect_config_error(j, "initial_state");
}

TEST(TaskConfig, WithHorizonKeepsFinalTime) {
  const TaskConfig c = parse_task(hopper_task(), tasks_dir()).with_horizon(40);
  EXPECT_EQ(c.horizon(), 40);
  EXPECT_DOUBLE_EQ(c.dt, 0.005);
  EXPECT_DOUBLE_EQ(c.solver.integrator.dt, 0.005);
  EXPECT_THROW(c.with_horizon(0), ConfigError);
}

TEST(TaskConfig, BundledTasksLoad) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(tasks_dir())) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_task(entry.path()));
    ++count;
  }
  EXPECT_GE(count, 11);
}

TEST(Format, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("b", fnv1a64("a")), fnv1a64("ab"));
}

TEST(Format, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.0, 0.0}) {
    const std::string s = format_number(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Run, DeterministicArtifacts) {
  const TaskConfig c = load_task(tasks_dir() / "lq-sanity.json");
  const auto tmp = std::filesystem::temp_directory_path() / "gaitopt_task_test";
  std::filesystem::remove_all(tmp);
  const TaskRun a = run_task(c, tmp / "a");
  TaskConfig threaded = c;
  threaded.solver.threads = 3;
  const TaskRun b = run_task(threaded, tmp / "b");
  EXPECT_EQ(a.exit_code, kExitSuccess);
  for (const char* file : {"trajectory.csv", "cost_trace.csv", "schedule.json"}) {
    const std::string x = read(tmp / "a" / file);
    EXPECT_FALSE(x.empty()) << file;
    EXPECT_EQ(x, read(tmp / "b" / file)) << file;
  }
  const json diag = json::parse(read(tmp / "a" / "diagnostics.json"));
  EXPECT_EQ(diag["status"], "converged");
  EXPECT_EQ(diag["iterations"], 1);
  std::filesystem::remove_all(tmp);
}

TEST(Convergence, SeriesNormalizesAndChecksMonotone) {
  SlqSolution s;
  s.status = SolveStatus::Converged;
  s.iterations = 2;
  s.cost_trace = {4.0, 2.0, 1.0};
  const ConvergenceSeries series = convergence_series("x", s);
  EXPECT_EQ(series.normalized, (std::vector<double>{1.0, 0.5, 0.25}));
  EXPECT_TRUE(series.monotone);
  s.cost_trace = {4.0, 5.0};
  EXPECT_FALSE(convergence_series("x", s).monotone);
}

TEST(Benchmark, FitLine) {
  const LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

}  // namespace
}  // namespace gaitopt
