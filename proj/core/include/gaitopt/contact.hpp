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

#include <vector>

#include "gaitopt/common.hpp"

namespace gaitopt {

/// Smooth spring-damper ground contact parameters (SI units).
///
/// Forces blend quadratically to zero for penetrations below `alpha_c`,
/// which keeps both the force and its slope continuous at touchdown.
struct ContactParams {
  double alpha_c = 0.01;  // m
  double k_n = 20000.0;   // N/m
  double d_n = 2000.0;
  double k_t = 1.0e6;     // N/m
  double d_t = 2000.0;
  double mu = 0.8;

  void validate() const;
};

struct GroundPlane {
  Vector3 point = Vector3::Zero();
  Vector3 normal = Vector3::UnitZ();

  static GroundPlane flat(double height = 0.0);
  // Plane through the origin rotated by `angle` about the world y axis.
  static GroundPlane inclined(double angle);

  void validate() const;
  double height_at(double x, double y) const;
};

/// Hidden per-foot contact state. The anchor records where contact was
/// established and is only meaningful while `in_contact` holds.
struct FootContact {
  bool in_contact = false;
  Vector3 anchor = Vector3::Zero();

  bool operator==(const FootContact& other) const {
    return in_contact == other.in_contact && anchor == other.anchor;
  }
};

using ContactState = std::vector<FootContact>;

struct Penetration {
  double depth = 0.0;       // p_n, positive below the plane
  double depth_rate = 0.0;  // dp_n/dt, positive when moving into the ground
  Vector3 tangential_position = Vector3::Zero();  // relative to plane.point
  Vector3 tangential_velocity = Vector3::Zero();
};

Penetration penetration(const Vector3& foot_position,
                        const Vector3& foot_velocity,
                        const GroundPlane& plane);

/// Scale factor shared by the normal and tangential models:
/// 0, p^2 / (2 alpha) or p - alpha / 2 depending on the branch.
double contact_blend(double depth, double alpha_c);

Vector3 normal_force(double depth, double depth_rate,
                     const ContactParams& params, const Vector3& normal);

/// Restoring tangential force. `displacement` is the tangential offset from
/// the anchor, `velocity` the tangential foot velocity.
Vector3 tangential_force(const Vector3& displacement, const Vector3& velocity,
                         double depth, const ContactParams& params);

/// Clamps the tangential force magnitude to mu * |normal force|.
Vector3 friction_saturate(const Vector3& tangential, const Vector3& normal,
                          double mu);

FootContact update_contact_state(const FootContact& state,
                                 const Vector3& foot_position,
                                 const GroundPlane& plane);

Vector3 project_onto_plane(const Vector3& point, const GroundPlane& plane);

struct FootForce {
  Vector3 normal = Vector3::Zero();
  Vector3 tangential = Vector3::Zero();
  Vector3 total() const { return normal + tangential; }
};

/// Normal force plus saturated tangential force for one foot. A foot that
/// penetrates without an established anchor is treated as anchored at its
/// current projection (no tangential spring, damping only).
FootForce foot_contact_force(const Vector3& foot_position,
                             const Vector3& foot_velocity,
                             const FootContact& state,
                             const GroundPlane& plane,
                             const ContactParams& params);

}  // namespace gaitopt
