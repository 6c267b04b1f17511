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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitopt/contact.hpp"
#include "gaitopt/cost.hpp"
#include "gaitopt/rigid_body_system.hpp"
#include "gaitopt/schedule.hpp"
#include "gaitopt/slq.hpp"
#include "gaitopt/system.hpp"
#include "gaitopt/tracking.hpp"

// Task files are JSON. Units: seconds, meters, radians, kilograms, newtons.
//
//   {
//     "name": "hopper-squat-jump",
//     "model": "../models/planar_hopper.json",   relative to the task file
//     "t_f": 1.2, "dt": 0.004,                    t_f / dt must be an integer
//     "seed": 0,
//     "initial_state": STATE,
//     "initial_controller": "pd_hold" | "zero",
//     "plane": {"point": [0,0,0], "normal": [0,0,1]} | {"inclination": rad},
//     "contact": {"alpha_c", "k_n", "d_n", "k_t", "d_t", "mu"},
//     "solver": {"max_iterations", "alpha_d", "max_line_search_steps",
//                "convergence_threshold", "integrator", "threads"},
//     "cost": {"Q": WEIGHT, "R": WEIGHT, "H": WEIGHT,
//              "x_des": STATE | {"segments": [{"t", "x": STATE}]},
//              "u_des": INPUT,
//              "waypoints": [{"t", "rho", "W": WEIGHT, "x": STATE}]},
//     "tracking": {...}, "benchmark": {...}                optional
//   }
//
// WEIGHT is a number (times identity), a diagonal vector, a full nested
// matrix, or an object {"default": w, NAME: w, ...}. STATE is a full vector
// or an object {"from": "initial" | "zero", NAME: value, ...}. NAME is a
// coordinate name (see coordinate_names), a group (base_orientation,
// base_position, joint_positions, base_angular_velocity,
// base_linear_velocity, joint_velocities) or a pattern with '*'. Exact names
// win over patterns, patterns over groups.

namespace gaitopt {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfigError = 2,
  kExitStalled = 3,
  kExitDiverged = 4,
};

struct TaskOverrides {
  std::optional<int> threads;
  std::optional<IntegratorMethod> integrator;
  std::optional<std::uint64_t> seed;
};

struct TrackingConfig {
  TrackingGains gains;
  TrackingSettings settings;
  std::vector<PlantPerturbation> perturbations;
  double min_height_fraction = 0.5;  // of the nominal minimum base height
};

struct BenchmarkConfig {
  std::vector<int> step_counts{250, 500, 1000, 2000, 4000};
  int repetitions = 3;
  int iterations = 3;  // solver iterations per run
};

struct TaskConfig {
  std::string name;
  std::string description;
  std::filesystem::path config_path;
  std::filesystem::path model_path;
  double final_time = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string initial_controller = "pd_hold";
  ContactParams contact;
  GroundPlane plane;
  SolverSettings solver;
  CostSpec cost;
  Vector initial_state;
  std::optional<TrackingConfig> tracking;
  BenchmarkConfig benchmark;
  std::string config_hash;  // FNV-1a 64 of task and model file bytes

  std::shared_ptr<const System> system;
  std::shared_ptr<const RigidBodySystem> rigid_body;  // null for linear models

  int horizon() const;
  AffineController make_initial_controller() const;
  /// Copy with dt = t_f / horizon, everything else unchanged.
  TaskConfig with_horizon(int horizon) const;
};

TaskConfig load_task(const std::filesystem::path& path,
                     const TaskOverrides& overrides = {});
TaskConfig parse_task(const nlohmann::json& j, const std::filesystem::path& base_dir,
                      const TaskOverrides& overrides = {});

std::vector<std::string> coordinate_names(const System& system);
std::vector<std::string> input_names(const System& system);

/// Deterministic shortest round-trip formatting used in every artifact.
std::string format_number(double value);
std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 14695981039346656037ull);

struct TaskRun {
  SlqSolution solution;
  ContactSchedule schedule;
  GaitStatistics statistics;
  double wall_time = 0.0;  // s
  int exit_code = kExitSuccess;
  std::string message;
};

/// Solves the task. Throws DynamicsError when the initial rollout diverges.
TaskRun solve_task(const TaskConfig& config,
                   const SlqSolver::IterationCallback& callback = {});

/// Solves and writes trajectory.csv, cost_trace.csv, schedule.json,
/// diagnostics.json and manifest.json to `output_dir`. Divergence is caught
/// and reported through the exit code.
TaskRun run_task(const TaskConfig& config, const std::filesystem::path& output_dir,
                 const SlqSolver::IterationCallback& callback = {});

void write_trajectory_csv(const TaskConfig& config, const StateInputTrajectory& trajectory,
                          const std::filesystem::path& path);

struct ClosedLoopRun {
  PlantPerturbation perturbation;
  ExecutionLog log;
  double nominal_min_height = 0.0;
  double min_height = 0.0;
  bool fell = false;
};

/// Runs every configured perturbation against the optimized trajectory.
std::vector<ClosedLoopRun> run_closed_loop(const TaskConfig& config,
                                           const SlqSolution& solution);

void write_execution_csv(const TaskConfig& config, const ExecutionLog& log,
                         const std::filesystem::path& path);

struct RuntimeSample {
  int steps = 0;
  int repetition = 0;
  int iterations = 0;
  double rollouts_per_iteration = 0.0;
  /// Mean over iterations; `rollout` is the time of a single rollout.
  PhaseTimings per_iteration;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RuntimeBenchmark {
  std::vector<RuntimeSample> samples;
  std::vector<int> steps;
  std::vector<double> mean;  // per-iteration wall time per N, s
  std::vector<double> stddev;
  LinearFit fit;
};

/// Reruns the task at each horizon N (dt = t_f / N) with a fixed iteration
/// budget and times every phase: one rollout plus linearization,
/// quadratization and backward pass. Repetitions run sequentially.
RuntimeBenchmark benchmark_runtime(const TaskConfig& config,
                                   const std::vector<int>& step_counts,
                                   int repetitions, int iterations);

void write_benchmark(const RuntimeBenchmark& bench, const std::filesystem::path& output_dir);

struct ConvergenceSeries {
  std::string task;
  std::vector<double> cost;
  std::vector<double> normalized;  // cost / cost[0]
  bool converged = false;
  std::string status;
  int iterations = 0;
  std::optional<int> iterations_to_threshold;
  bool monotone = true;
};

ConvergenceSeries convergence_series(const std::string& task,
                                     const SlqSolution& solution);

/// Reads diagnostics.json of each run directory.
std::vector<ConvergenceSeries> report_convergence(
    const std::vector<std::filesystem::path>& run_dirs);

void write_convergence_report(const std::vector<ConvergenceSeries>& series,
                              const std::filesystem::path& output_dir);

}  // namespace gaitopt
