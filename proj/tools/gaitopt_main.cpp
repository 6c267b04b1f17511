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

// gaitopt command line: solve, benchmark, convergence-report, simulate,
// validate-config. Exit codes: 0 success, 2 config error, 3 solver stall,
// 4 divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gaitopt/task.hpp"

namespace fs = std::filesystem;
using namespace gaitopt;

namespace {

struct CommonOptions {
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string integrator;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-o,--output-dir", opts.output_dir, "Directory for artifacts");
  cmd->add_option("--seed", opts.seed, "Random seed (torque noise)");
  cmd->add_option("--threads", opts.threads, "Threads for linearization and quadratization")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--integrator", opts.integrator, "Integrator override: rk4 or explicit-euler")
      ->check(CLI::IsMember({"rk4", "explicit-euler", "euler"}));
  cmd->add_flag("-q,--quiet", opts.quiet, "Only print the summary line");
}

TaskOverrides overrides_from(const CommonOptions& opts) {
  TaskOverrides o;
  o.seed = opts.seed;
  o.threads = opts.threads;
  if (!opts.integrator.empty()) o.integrator = parse_integrator(opts.integrator);
  return o;
}

fs::path output_dir_for(const CommonOptions& opts, const TaskConfig& config) {
  if (!opts.output_dir.empty()) return opts.output_dir;
  return fs::path("runs") / config.name;
}

SlqSolver::IterationCallback progress(bool quiet) {
  if (quiet) return {};
  return [](const IterationRecord& r) {
    std::printf("  iter %3d  cost %.6e  alpha %-9.4g  |l|max %.3e  mu %-7.1e ls %d%s\n",
                r.iteration, r.cost, r.alpha, r.max_ff_increment, r.regularization,
                r.line_search_steps, r.accepted ? "" : "  (no step)");
    std::fflush(stdout);
  };
}

int solve(const std::string& config_path, const CommonOptions& opts) {
  const TaskConfig config = load_task(config_path, overrides_from(opts));
  const fs::path out = output_dir_for(opts, config);
  if (!opts.quiet)
    std::printf("%s: N = %d, dt = %g s, %s\n", config.name.c_str(), config.horizon(), config.dt,
                to_string(config.solver.integrator.method).c_str());
  const TaskRun run = run_task(config, out, progress(opts.quiet));
  if (run.exit_code == kExitDiverged) {
    std::fprintf(stderr, "%s: diverged: %s\n", config.name.c_str(), run.message.c_str());
    return run.exit_code;
  }
  const auto& sol = run.solution;
  std::printf("%s: %s after %d iterations, cost %.6e -> %.6e (%.1f s), artifacts in %s\n",
              config.name.c_str(), to_string(sol.status).c_str(), sol.iterations,
              sol.cost_trace.front(), sol.cost_trace.back(), run.wall_time, out.string().c_str());
  return run.exit_code;
}

int simulate(const std::string& config_path, const CommonOptions& opts) {
  const TaskConfig config = load_task(config_path, overrides_from(opts));
  if (!config.tracking) throw ConfigError("tracking", "task has no tracking section");
  const fs::path out = output_dir_for(opts, config);
  const TaskRun run = run_task(config, out, progress(opts.quiet));
  if (run.exit_code == kExitDiverged) {
    std::fprintf(stderr, "%s: optimization diverged: %s\n", config.name.c_str(),
                 run.message.c_str());
    return run.exit_code;
  }
  const auto runs = run_closed_loop(config, run.solution);
  nlohmann::json summary = nlohmann::json::array();
  int code = run.exit_code;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    const std::string file = "closed_loop_" + std::to_string(k) + ".csv";
    write_execution_csv(config, r.log, out / file);
    summary.push_back({{"log", file},
                       {"mass_scale", r.perturbation.mass_scale},
                       {"contact_stiffness_scale", r.perturbation.contact_stiffness_scale},
                       {"contact_damping_scale", r.perturbation.contact_damping_scale},
                       {"torque_noise_std", r.perturbation.torque_noise_std},
                       {"nominal_min_height", r.nominal_min_height},
                       {"min_height", r.min_height},
                       {"fell", r.fell},
                       {"diverged", r.log.diverged},
                       {"divergence_index", r.log.divergence_index},
                       {"max_joint_error", r.log.max_joint_error()}});
    std::printf("  plant %zu: mass x%.3g  min height %.4f m (nominal %.4f m)  %s\n", k,
                r.perturbation.mass_scale, r.min_height, r.nominal_min_height,
                r.log.diverged ? "DIVERGED" : (r.fell ? "FELL" : "ok"));
    if (r.log.diverged) code = kExitDiverged;
  }
  std::ofstream(out / "closed_loop.json") << summary.dump(2) << "\n";
  return code;
}

int benchmark(const std::string& config_path, const CommonOptions& opts,
              std::vector<int> steps, int repetitions, int iterations) {
  const TaskConfig config = load_task(config_path, overrides_from(opts));
  if (steps.empty()) steps = config.benchmark.step_counts;
  if (repetitions <= 0) repetitions = config.benchmark.repetitions;
  if (iterations <= 0) iterations = config.benchmark.iterations;
  const fs::path out = opts.output_dir.empty() ? fs::path("runs") / (config.name + "-benchmark")
                                               : fs::path(opts.output_dir);
  const RuntimeBenchmark bench = benchmark_runtime(config, steps, repetitions, iterations);
  write_benchmark(bench, out);
  for (std::size_t i = 0; i < bench.steps.size(); ++i)
    std::printf("  N = %5d  %.4f s/iteration  (std %.4f)\n", bench.steps[i], bench.mean[i],
                bench.stddev[i]);
  std::printf("fit: %.3e s/step * N + %.3e s, R^2 = %.5f\n", bench.fit.slope,
              bench.fit.intercept, bench.fit.r_squared);
  return kExitSuccess;
}

int convergence_report(const std::vector<std::string>& dirs, const CommonOptions& opts) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  const auto series = report_convergence(paths);
  const fs::path out = opts.output_dir.empty() ? fs::path("runs") : fs::path(opts.output_dir);
  write_convergence_report(series, out);
  for (const auto& s : series)
    std::printf("  %-32s %-15s %3d iterations  final %.4g  %s\n", s.task.c_str(),
                s.status.c_str(), s.iterations, s.normalized.empty() ? 0.0 : s.normalized.back(),
                s.monotone ? "monotone" : "NOT MONOTONE");
  return kExitSuccess;
}

int validate(const std::vector<std::string>& configs, const CommonOptions& opts) {
  int code = kExitSuccess;
  for (const auto& path : configs) {
    try {
      const TaskConfig config = load_task(path, overrides_from(opts));
      std::printf("%s: ok (%s, n = %d, m = %d, N = %d)\n", path.c_str(),
                  config.system->name().c_str(), config.system->state_dim(),
                  config.system->input_dim(), config.horizon());
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
      code = kExitConfigError;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitopt: SLQ trajectory optimization through contact"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GAITOPT_VERSION);

  CommonOptions opts;
  std::string config;
  std::vector<std::string> many;
  std::vector<int> steps;
  int repetitions = 0;
  int iterations = 0;

  auto* solve_cmd = app.add_subcommand("solve", "Optimize a task and write artifacts");
  solve_cmd->add_option("config", config, "Task file")->required()->check(CLI::ExistingFile);
  add_common(solve_cmd, opts);

  auto* sim_cmd = app.add_subcommand("simulate", "Optimize, then track on perturbed plants");
  sim_cmd->add_option("config", config, "Task file")->required()->check(CLI::ExistingFile);
  add_common(sim_cmd, opts);

  auto* bench_cmd = app.add_subcommand("benchmark", "Per-iteration runtime versus horizon");
  bench_cmd->add_option("config", config, "Task file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--steps", steps, "Horizons N (default from the task)");
  bench_cmd->add_option("--repetitions", repetitions, "Runs per horizon");
  bench_cmd->add_option("--iterations", iterations, "Solver iterations per run");
  add_common(bench_cmd, opts);

  auto* conv_cmd = app.add_subcommand("convergence-report", "Normalized cost traces of runs");
  conv_cmd->add_option("runs", many, "Run directories")->required()->check(CLI::ExistingDirectory);
  add_common(conv_cmd, opts);

  auto* val_cmd = app.add_subcommand("validate-config", "Check task files");
  val_cmd->add_option("configs", many, "Task files")->required();
  add_common(val_cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*solve_cmd) return solve(config, opts);
    if (*sim_cmd) return simulate(config, opts);
    if (*bench_cmd) return benchmark(config, opts, steps, repetitions, iterations);
    if (*conv_cmd) return convergence_report(many, opts);
    if (*val_cmd) return validate(many, opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const DynamicsError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDiverged;
  }
  return kExitSuccess;
}
