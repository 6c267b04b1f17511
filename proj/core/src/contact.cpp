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

#include "gaitopt/contact.hpp"

#include <cmath>

namespace gaitopt {

void ContactParams::validate() const {
  if (!(alpha_c > 0.0)) throw ConfigError("contact.alpha_c", "must be > 0");
  if (k_n < 0.0) throw ConfigError("contact.k_n", "must be >= 0");
  if (d_n < 0.0) throw ConfigError("contact.d_n", "must be >= 0");
  if (k_t < 0.0) throw ConfigError("contact.k_t", "must be >= 0");
  if (d_t < 0.0) throw ConfigError("contact.d_t", "must be >= 0");
  if (mu < 0.0) throw ConfigError("contact.mu", "must be >= 0");
}

GroundPlane GroundPlane::flat(double height) {
  GroundPlane plane;
  plane.point = Vector3(0.0, 0.0, height);
  return plane;
}

GroundPlane GroundPlane::inclined(double angle) {
  GroundPlane plane;
  plane.normal = Vector3(-std::sin(angle), 0.0, std::cos(angle));
  return plane;
}

void GroundPlane::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9)
    throw ConfigError("plane.normal", "must have unit length");
  if (!(normal.z() > 0.0))
    throw ConfigError("plane.normal", "must point upwards");
  if (!point.allFinite()) throw ConfigError("plane.point", "must be finite");
}

double GroundPlane::height_at(double x, double y) const {
  // n . (p - point) = 0 solved for z.
  return point.z() - (normal.x() * (x - point.x()) +
                      normal.y() * (y - point.y())) / normal.z();
}

Penetration penetration(const Vector3& foot_position,
                        const Vector3& foot_velocity,
                        const GroundPlane& plane) {
  const Vector3& n = plane.normal;
  const Vector3 offset = foot_position - plane.point;
  Penetration result;
  result.depth = -n.dot(offset);
  result.depth_rate = -n.dot(foot_velocity);
  result.tangential_position = offset - n.dot(offset) * n;
  result.tangential_velocity = foot_velocity - n.dot(foot_velocity) * n;
  return result;
}

double contact_blend(double depth, double alpha_c) {
  if (depth <= 0.0) return 0.0;
  if (depth < alpha_c) return depth * depth / (2.0 * alpha_c);
  return depth - 0.5 * alpha_c;
}

Vector3 normal_force(double depth, double depth_rate,
                     const ContactParams& params, const Vector3& normal) {
  const double blend = contact_blend(depth, params.alpha_c);
  if (blend == 0.0) return Vector3::Zero();
  // No adhesion: a fast retracting foot would otherwise pull on the ground.
  const double magnitude =
      std::max(0.0, (params.k_n + params.d_n * depth_rate) * blend);
  return magnitude * normal;
}

Vector3 tangential_force(const Vector3& displacement, const Vector3& velocity,
                         double depth, const ContactParams& params) {
  const double blend = contact_blend(depth, params.alpha_c);
  if (blend == 0.0) return Vector3::Zero();
  // k |p| n_d == k p, so the spring and damper are written without the
  // normalised directions; zero vectors then contribute nothing.
  return -(params.k_t * displacement + params.d_t * velocity) * blend;
}

Vector3 friction_saturate(const Vector3& tangential, const Vector3& normal,
                          double mu) {
  const double limit = mu * normal.norm();
  const double magnitude = tangential.norm();
  if (magnitude <= limit) return tangential;
  if (limit == 0.0) return Vector3::Zero();
  // Rounding can leave the scaled vector a few ulp outside the cone.
  double scale = limit / magnitude;
  Vector3 out = tangential * scale;
  while (out.norm() > limit) {
    scale = std::nextafter(scale, 0.0);
    out = tangential * scale;
  }
  return out;
}

Vector3 project_onto_plane(const Vector3& point, const GroundPlane& plane) {
  const Vector3& n = plane.normal;
  return point - n.dot(point - plane.point) * n;
}

FootContact update_contact_state(const FootContact& state,
                                 const Vector3& foot_position,
                                 const GroundPlane& plane) {
  const double depth = -plane.normal.dot(foot_position - plane.point);
  if (depth <= 0.0) return FootContact{};
  if (state.in_contact) return state;
  return FootContact{true, project_onto_plane(foot_position, plane)};
}

FootForce foot_contact_force(const Vector3& foot_position,
                             const Vector3& foot_velocity,
                             const FootContact& state,
                             const GroundPlane& plane,
                             const ContactParams& params) {
  FootForce force;
  const Penetration pen = penetration(foot_position, foot_velocity, plane);
  if (pen.depth <= 0.0) return force;

  force.normal = normal_force(pen.depth, pen.depth_rate, params, plane.normal);
  Vector3 displacement = Vector3::Zero();
  if (state.in_contact) {
    const Vector3 offset = foot_position - state.anchor;
    displacement = offset - plane.normal.dot(offset) * plane.normal;
  }
  const Vector3 tangential = tangential_force(
      displacement, pen.tangential_velocity, pen.depth, params);
  force.tangential = friction_saturate(tangential, force.normal, params.mu);
  return force;
}

}  // namespace gaitopt
