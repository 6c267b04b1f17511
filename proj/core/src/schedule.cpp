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

#include "gaitopt/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace gaitopt {
namespace {

struct Run {
  bool value;
  int begin;
  int end;  // exclusive
};

std::vector<Run> runs_of(const std::vector<bool>& flags) {
  std::vector<Run> runs;
  for (int k = 0; k < static_cast<int>(flags.size()); ++k) {
    if (runs.empty() || runs.back().value != flags[k])
      runs.push_back({flags[k], k, k + 1});
    else
      runs.back().end = k + 1;
  }
  return runs;
}

void flip_short_runs(std::vector<bool>& flags, bool value, int min_samples) {
  const auto runs = runs_of(flags);
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    if (runs[r].value != value || runs[r].end - runs[r].begin >= min_samples) continue;
    for (int k = runs[r].begin; k < runs[r].end; ++k) flags[k] = !value;
  }
}

// Overlap length of two sorted interval lists.
double intersection(const std::vector<StanceInterval>& a,
                    const std::vector<StanceInterval>& b) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].touchdown, b[j].touchdown);
    const double hi = std::min(a[i].liftoff, b[j].liftoff);
    if (hi > lo) total += hi - lo;
    if (a[i].liftoff < b[j].liftoff) ++i;
    else ++j;
  }
  return total;
}

double stance_time(const std::vector<StanceInterval>& intervals) {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.duration();
  return total;
}

}  // namespace

bool ContactSchedule::in_contact(int foot, int sample) const {
  const double t = (sample + 0.5) * dt;
  for (const auto& iv : feet[foot])
    if (t >= iv.touchdown && t < iv.liftoff) return true;
  return false;
}

std::vector<bool> debounce(const std::vector<bool>& flags, int min_samples) {
  std::vector<bool> out = flags;
  if (min_samples <= 1) return out;
  flip_short_runs(out, false, min_samples);
  flip_short_runs(out, true, min_samples);
  return out;
}

ContactSchedule schedule_from_flags(const std::vector<std::vector<bool>>& flags,
                                    double dt, double min_phase_duration,
                                    std::vector<std::string> foot_names) {
  ContactSchedule schedule;
  schedule.dt = dt;
  schedule.final_time = dt * static_cast<double>(flags.size());
  const int num_feet = flags.empty() ? static_cast<int>(foot_names.size())
                                     : static_cast<int>(flags.front().size());
  if (foot_names.empty())
    for (int f = 0; f < num_feet; ++f) foot_names.push_back("foot" + std::to_string(f));
  schedule.foot_names = std::move(foot_names);
  if (min_phase_duration < 0.0) min_phase_duration = 3.0 * dt;
  const int min_samples = static_cast<int>(std::ceil(min_phase_duration / dt - 1e-9));

  schedule.feet.resize(num_feet);
  for (int f = 0; f < num_feet; ++f) {
    std::vector<bool> signal(flags.size());
    for (std::size_t k = 0; k < flags.size(); ++k) signal[k] = flags[k][f];
    for (const Run& run : runs_of(debounce(signal, min_samples)))
      if (run.value) schedule.feet[f].push_back({run.begin * dt, run.end * dt});
  }
  return schedule;
}

ContactSchedule extract_schedule(const StateInputTrajectory& trajectory,
                                 double min_phase_duration,
                                 std::vector<std::string> foot_names) {
  std::vector<std::vector<bool>> flags;
  for (int k = 0; k < trajectory.horizon(); ++k) {
    std::vector<bool> row;
    for (const auto& foot : trajectory.contacts[k]) row.push_back(foot.in_contact);
    flags.push_back(std::move(row));
  }
  return schedule_from_flags(flags, trajectory.dt, min_phase_duration,
                             std::move(foot_names));
}

GaitStatistics gait_statistics(const ContactSchedule& schedule) {
  GaitStatistics stats;
  const int n = schedule.num_feet();
  const double eps = 1e-9 * std::max(1.0, schedule.final_time);
  for (const auto& intervals : schedule.feet) {
    int liftoffs = 0;
    for (const auto& iv : intervals)
      if (iv.liftoff < schedule.final_time - eps) ++liftoffs;
    stats.step_count.push_back(liftoffs);
    stats.duty_factor.push_back(schedule.final_time > 0.0
                                    ? stance_time(intervals) / schedule.final_time
                                    : 0.0);
  }
  stats.overlap.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double both = intersection(schedule.feet[i], schedule.feet[j]);
      const double either =
          stance_time(schedule.feet[i]) + stance_time(schedule.feet[j]) - both;
      stats.overlap[i][j] = either > 0.0 ? both / either : 0.0;
    }
  }
  return stats;
}

nlohmann::json to_json(const ContactSchedule& schedule) {
  nlohmann::json feet = nlohmann::json::array();
  for (int f = 0; f < schedule.num_feet(); ++f) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& iv : schedule.feet[f])
      intervals.push_back({iv.touchdown, iv.liftoff});
    feet.push_back({{"name", schedule.foot_names[f]}, {"stance", intervals}});
  }
  return {{"final_time", schedule.final_time}, {"dt", schedule.dt}, {"feet", feet}};
}

nlohmann::json to_json(const GaitStatistics& stats) {
  return {{"step_count", stats.step_count},
          {"duty_factor", stats.duty_factor},
          {"overlap", stats.overlap}};
}

}  // namespace gaitopt
