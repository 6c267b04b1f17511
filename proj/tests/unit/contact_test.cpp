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

#include <random>

#include "gaitopt/contact.hpp"

namespace gaitopt {
namespace {

TEST(ContactBlend, Branches) {
  EXPECT_EQ(contact_blend(-0.1, 0.01), 0.0);
  EXPECT_EQ(contact_blend(0.0, 0.01), 0.0);
  EXPECT_DOUBLE_EQ(contact_blend(0.005, 0.01), 0.005 * 0.005 / 0.02);
  EXPECT_DOUBLE_EQ(contact_blend(0.03, 0.01), 0.025);
}

TEST(ContactBlend, ValueAndSlopeContinuous) {
  const double a = 0.01, h = 1e-9;
  EXPECT_NEAR(contact_blend(a - h, a), contact_blend(a + h, a), 1e-8);
  const double left = (contact_blend(a - h, a) - contact_blend(a - 2 * h, a)) / h;
  const double right = (contact_blend(a + 2 * h, a) - contact_blend(a + h, a)) / h;
  EXPECT_NEAR(left, 1.0, 1e-6);
  EXPECT_NEAR(right, 1.0, 1e-6);
  EXPECT_NEAR(contact_blend(h, a) / h, 0.0, 1e-6);
}

TEST(NormalForce, HandComputed) {
  ContactParams p;
  p.alpha_c = 0.01;
  p.k_n = 10000.0;
  p.d_n = 1000.0;
  // (10000 + 1000 * 0.5) * (0.02 - 0.005) = 157.5
  const Vector3 f = normal_force(0.02, 0.5, p, Vector3::UnitZ());
  EXPECT_NEAR(f.z(), 157.5, 1e-12);
  EXPECT_NEAR(f.head<2>().norm(), 0.0, 1e-15);
  // (10000 - 1000 * 1) * 0.005^2 / 0.02 = 11.25
  EXPECT_NEAR(normal_force(0.005, -1.0, p, Vector3::UnitZ()).z(), 11.25, 1e-12);
}

TEST(NormalForce, NoAdhesion) {
  ContactParams p;
  p.k_n = 10000.0;
  p.d_n = 10000.0;
  const Vector3 f = normal_force(0.02, -5.0, p, Vector3::UnitZ());
  EXPECT_EQ(f.z(), 0.0);
}

TEST(FrictionSaturate, ClampsMagnitudeKeepsDirection) {
  const Vector3 t(72.0, 96.0, 0.0);  // |t| = 120
  const Vector3 n(0.0, 0.0, 100.0);
  const Vector3 s = friction_saturate(t, n, 0.8);
  EXPECT_NEAR(s.norm(), 80.0, 1e-12);
  EXPECT_NEAR(s.normalized().dot(t.normalized()), 1.0, 1e-15);
  EXPECT_EQ(friction_saturate(Vector3(1, 0, 0), n, 0.8), Vector3(1, 0, 0));
  EXPECT_EQ(friction_saturate(t, Vector3::Zero(), 0.8), Vector3::Zero());
}

TEST(TangentialForce, RestoringSpringAndDamper) {
  ContactParams p;
  p.k_t = 1000.0;
  p.d_t = 10.0;
  p.alpha_c = 0.01;
  const double depth = 0.02;  // blend 0.015
  const Vector3 f = tangential_force(Vector3(0.01, 0, 0), Vector3(0, 0.5, 0), depth, p);
  EXPECT_NEAR(f.x(), -1000.0 * 0.01 * 0.015, 1e-14);
  EXPECT_NEAR(f.y(), -10.0 * 0.5 * 0.015, 1e-14);
  EXPECT_EQ(tangential_force(Vector3(1, 0, 0), Vector3::Zero(), -0.01, p), Vector3::Zero());
}

TEST(ContactState, AnchorSetAtTouchdownAndKept) {
  const GroundPlane plane = GroundPlane::flat();
  FootContact s;
  s = update_contact_state(s, Vector3(0.3, 0.1, 0.02), plane);
  EXPECT_FALSE(s.in_contact);
  s = update_contact_state(s, Vector3(0.3, 0.1, -0.001), plane);
  ASSERT_TRUE(s.in_contact);
  EXPECT_TRUE(s.anchor.isApprox(Vector3(0.3, 0.1, 0.0)));
  s = update_contact_state(s, Vector3(0.35, 0.1, -0.004), plane);
  EXPECT_TRUE(s.anchor.isApprox(Vector3(0.3, 0.1, 0.0)));
  s = update_contact_state(s, Vector3(0.4, 0.1, 0.001), plane);
  EXPECT_FALSE(s.in_contact);
}

TEST(ContactState, AnchorOnInclinedPlane) {
  const GroundPlane plane = GroundPlane::inclined(0.3);
  const Vector3 foot(0.5, 0.0, plane.height_at(0.5, 0.0) - 0.002);
  const FootContact s = update_contact_state(FootContact{}, foot, plane);
  ASSERT_TRUE(s.in_contact);
  EXPECT_NEAR(plane.normal.dot(s.anchor - plane.point), 0.0, 1e-15);
}

TEST(FootContactForce, NoSpringWithoutAnchor) {
  ContactParams p;
  const GroundPlane plane = GroundPlane::flat();
  const Vector3 foot(0.2, 0.0, -0.02);
  const FootForce f = foot_contact_force(foot, Vector3::Zero(), FootContact{}, plane, p);
  EXPECT_GT(f.normal.z(), 0.0);
  EXPECT_EQ(f.tangential, Vector3::Zero());
  const FootForce g =
      foot_contact_force(foot, Vector3::Zero(), FootContact{true, Vector3(0.19, 0, 0)}, plane, p);
  EXPECT_LT(g.tangential.x(), 0.0);
}

TEST(FootContactForce, ConeRespectedOverRandomSamples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GroundPlane plane = GroundPlane::inclined(0.2);
  for (int i = 0; i < 2000; ++i) {
    ContactParams p;
    p.k_n = 8000.0 + 41000.0 * (u(rng) + 1.0);
    p.d_n = 2000.0 + 24000.0 * (u(rng) + 1.0);
    p.k_t = 2.5e6 * (u(rng) + 1.0);
    p.d_t = 2000.0 + 1500.0 * (u(rng) + 1.0);
    p.mu = 0.5 + 0.25 * (u(rng) + 1.0);
    const Vector3 foot(u(rng), u(rng), 0.03 * u(rng));
    const Vector3 vel(u(rng), u(rng), u(rng));
    const FootContact state{true, Vector3(u(rng), u(rng), 0.0)};
    const FootForce f = foot_contact_force(foot, vel, state, plane, p);
    EXPECT_LE(f.tangential.norm(), p.mu * f.normal.norm() + 1e-12);
    EXPECT_GE(f.normal.dot(plane.normal), 0.0);
  }
}

TEST(GroundPlane, Validation) {
  GroundPlane bad;
  bad.normal = Vector3(0, 0, 2);
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.normal = Vector3(0, 0, -1);
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_NO_THROW(GroundPlane::inclined(0.4).validate());
  ContactParams p;
  p.alpha_c = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace gaitopt
