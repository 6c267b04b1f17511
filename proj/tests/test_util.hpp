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
#include <random>
#include <string>

#include "gaitopt/model_io.hpp"
#include "gaitopt/rigid_body_model.hpp"
#include "gaitopt/rigid_body_system.hpp"

namespace gaitopt::testing {

inline std::filesystem::path data_dir() { return GAITOPT_DATA_DIR; }

inline RigidBodyModel load_model(const std::string& name) {
  return load_rigid_body_model(data_dir() / "models" / (name + ".json"));
}

// Fixed-base pendulum: point-ish bob of mass m at distance l along -z,
// revolute about y.
inline RigidBodyModel pendulum(double m = 1.3, double l = 0.7, double inertia = 0.02) {
  std::vector<Link> links(2);
  links[0].name = "world";
  links[0].mass = 1.0;
  links[0].inertia = Matrix3::Identity();
  links[1].name = "bob";
  links[1].mass = m;
  links[1].inertia = inertia * Matrix3::Identity();
  links[1].com = Vector3(0.0, 0.0, -l);
  Joint j;
  j.name = "swing";
  j.axis = Vector3::UnitY();
  j.parent = 0;
  j.child = 1;
  PdGains pd{Vector::Zero(1), Vector::Zero(1)};
  return RigidBodyModel("pendulum", BaseType::Fixed, links, {j}, {}, {0},
                        Vector3(0, 0, -9.81), pd);
}

// Single free body, no joints.
inline RigidBodyModel free_body(BaseType base, double m, const Matrix3& inertia,
                                const Vector3& com = Vector3::Zero()) {
  std::vector<Link> links(1);
  links[0].name = "body";
  links[0].mass = m;
  links[0].inertia = inertia;
  links[0].com = com;
  Foot foot{"corner", 0, Vector3(0.1, 0.05, -0.2)};
  return RigidBodyModel("body", base, links, {}, {foot}, {}, Vector3(0, 0, -9.81),
                        PdGains{Vector(), Vector()});
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Random configuration away from gimbal lock for spatial bases.
inline Vector random_positions(std::mt19937_64& rng, const RigidBodyModel& model,
                               double joint_range = 1.0) {
  const StateLayout layout(model);
  Vector q = random_vector(rng, layout.dofs(), joint_range);
  for (int i = 0; i < layout.orientation; ++i) q[i] *= 0.8;
  for (int i = 0; i < layout.position; ++i) q[layout.orientation + i] *= 0.5;
  return q;
}

}  // namespace gaitopt::testing
