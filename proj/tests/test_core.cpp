#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "minidrive/core.hpp"
#include "support/oracles.hpp"

using namespace minidrive;
constexpr double kPi = std::numbers::pi;

TEST(WrapAngle, Examples) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(-7.0 * kPi / 2.0), kPi / 2.0, 1e-14);
  EXPECT_THROW(wrap_angle(std::nan("")), std::domain_error);
  EXPECT_THROW(wrap_angle(INFINITY), std::domain_error);
}

TEST(WrapAngle, RangeAndEquivalence) {
  oracle::Gen gen(11);
  for (int i = 0; i < 5000; ++i) {
    const double a = gen.uniform(-1e3, 1e3);
    const double w = wrap_angle(a);
    ASSERT_GT(w, -kPi);
    ASSERT_LE(w, kPi);
    ASSERT_NEAR(std::cos(w), std::cos(a), 1e-9);
    ASSERT_NEAR(std::sin(w), std::sin(a), 1e-9);
    ASSERT_EQ(wrap_angle(w), w);
  }
}

TEST(WrapAngle, FloatScalar) {
  EXPECT_NEAR(wrap_angle(7.0f), 7.0f - 2.0f * std::numbers::pi_v<float>, 1e-5f);
}

TEST(Frames, BodyToWorldExamples) {
  const Pose2D pose(1.0, 2.0, kPi / 2.0);
  const Vector2 w = body_to_world(pose, Vector2(1.0, 0.0));
  EXPECT_NEAR(w.x(), 1.0, 1e-15);
  EXPECT_NEAR(w.y(), 3.0, 1e-15);
  const Vector2 w2 = body_to_world(pose, Vector2(0.0, 1.0));
  EXPECT_NEAR(w2.x(), 0.0, 1e-15);
  EXPECT_NEAR(w2.y(), 2.0, 1e-15);
}

TEST(Frames, RoundTripAndIsometry) {
  oracle::Gen gen(12);
  for (int i = 0; i < 2000; ++i) {
    const Pose2D pose(gen.uniform(-10, 10), gen.uniform(-10, 10),
                      gen.uniform(-4, 4));
    const Vector2 p(gen.uniform(-5, 5), gen.uniform(-5, 5));
    const Vector2 q(gen.uniform(-5, 5), gen.uniform(-5, 5));
    const Vector2 back = world_to_body(pose, body_to_world(pose, p));
    ASSERT_NEAR((back - p).norm(), 0.0, 1e-12);
    ASSERT_NEAR((body_to_world(pose, p) - body_to_world(pose, q)).norm(),
                (p - q).norm(), 1e-12);
  }
}

TEST(Frames, RotationIsOrthonormal) {
  for (double yaw = -3.0; yaw < 3.0; yaw += 0.37) {
    const Mat2<double> r = rotation(yaw);
    EXPECT_NEAR((r * r.transpose() - Mat2<double>::Identity()).norm(), 0.0,
                1e-15);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-15);
  }
}

TEST(Frames, PoseWrapsYaw) {
  EXPECT_NEAR(Pose2D(0, 0, 2.0 * kPi + 0.5).yaw, 0.5, 1e-15);
}

TEST(Geometry, DefaultsAndValidation) {
  VehicleGeometry g;
  EXPECT_NO_THROW(g.validate());
  EXPECT_DOUBLE_EQ(g.body_center_offset().x(), 0.15);
  g.wheelbase = 0.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = {};
  g.body_length = 0.2;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}
