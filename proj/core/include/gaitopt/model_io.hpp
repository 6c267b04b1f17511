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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "gaitopt/common.hpp"
#include "gaitopt/linear_system.hpp"
#include "gaitopt/rigid_body_model.hpp"

// Model files (JSON, SI units). Rigid-body models:
//
//   {
//     "name": "planar_hopper",
//     "planar": true,            // pitch/x/z floating base
//     "fixed_base": false,       // true: base link welded to the world
//     "gravity": [0, 0, -9.81],
//     "links":  [{"name", "mass", "inertia", "com"}],
//     "joints": [{"name", "type": "revolute"|"prismatic", "axis",
//                 "parent", "child", "origin": {"xyz", "rpy"}}],
//     "feet":   [{"name", "link", "offset"}],
//     "actuated_joints": ["hip", "knee"],
//     "pd_hold": {"kp": {"hip": 300}, "kd": {"hip": 10}}
//   }
//
// `inertia` is a scalar (I_yy, planar models), a diagonal [Ixx, Iyy, Izz]
// or a full 3x3 row-major nested array. The base link is the one that is
// never a joint child. PD gains may also be a single number or an array in
// joint order. Linear models are {"name", "type": "linear", "A", "B"}.

namespace gaitopt {

using json = nlohmann::json;

Vector json_vector(const json& j, const std::string& field);
Matrix json_matrix(const json& j, const std::string& field);
Vector3 json_vector3(const json& j, const std::string& field);

bool is_linear_model(const json& j);

RigidBodyModel parse_rigid_body_model(const json& j);
LinearSystem parse_linear_system(const json& j);

json read_json_file(const std::filesystem::path& path);

RigidBodyModel load_rigid_body_model(const std::filesystem::path& path);

}  // namespace gaitopt
