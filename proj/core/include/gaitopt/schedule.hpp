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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitopt/system.hpp"

namespace gaitopt {

struct StanceInterval {
  double touchdown = 0.0;  // s
  double liftoff = 0.0;    // s, exclusive
  double duration() const { return liftoff - touchdown; }
};

/// Stance intervals per foot, sorted and disjoint within [0, t_f].
struct ContactSchedule {
  double final_time = 0.0;
  double dt = 0.0;
  std::vector<std::string> foot_names;
  std::vector<std::vector<StanceInterval>> feet;

  int num_feet() const { return static_cast<int>(feet.size()); }
  /// Sample k covers [k dt, (k + 1) dt).
  bool in_contact(int foot, int sample) const;
};

/// Fills interior flight gaps shorter than `min_samples`, then drops
/// interior stance blips shorter than `min_samples`. Runs touching either
/// end of the horizon are kept.
std::vector<bool> debounce(const std::vector<bool>& flags, int min_samples);

/// Builds the schedule from the recorded in-contact flags of samples
/// 0..N-1. `min_phase_duration` < 0 selects 3 dt.
ContactSchedule extract_schedule(const StateInputTrajectory& trajectory,
                                 double min_phase_duration = -1.0,
                                 std::vector<std::string> foot_names = {});

/// Same, from raw per-sample flags (flags[k][foot]).
ContactSchedule schedule_from_flags(const std::vector<std::vector<bool>>& flags,
                                    double dt, double min_phase_duration,
                                    std::vector<std::string> foot_names = {});

struct GaitStatistics {
  std::vector<int> step_count;      // liftoffs per foot
  std::vector<double> duty_factor;  // stance time / t_f
  /// Stance-time intersection over union for every foot pair, symmetric,
  /// 1 on the diagonal. Zero when neither foot ever stands.
  std::vector<std::vector<double>> overlap;
};

GaitStatistics gait_statistics(const ContactSchedule& schedule);

nlohmann::json to_json(const ContactSchedule& schedule);
nlohmann::json to_json(const GaitStatistics& stats);

}  // namespace gaitopt
