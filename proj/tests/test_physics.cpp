#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "minidrive/physics.hpp"
#include "support/oracles.hpp"

using namespace minidrive;

namespace {

WorldMap walled(double tile, int n, std::vector<DynamicBox> boxes = {}) {
  return WorldMap(tile, std::vector(n, std::vector(n, Tile{})), std::move(boxes),
                  true, false);
}

std::vector<oracle::Segment> scene_segments(const WorldMap& m) {
  std::vector<oracle::Segment> segs;
  for (const DynamicBox& b : m.boxes()) {
    oracle::append_box_edges(segs, b.center, b.half_extent, b.half_extent, b.yaw);
  }
  for (const WallSegment& w : m.walls()) segs.push_back({w.a, w.b});
  return segs;
}

DynamicBox box_at(double x, double y, double yaw = 0.0) {
  DynamicBox b;
  b.center = {x, y};
  b.yaw = yaw;
  return b;
}

}  // namespace

TEST(Raycast, Examples) {
  const WorldMap m = walled(1.8, 2, {box_at(2.0, 1.0)});
  const auto hit = raycast(m, {1.0, 1.0}, {1.0, 0.0}, 12.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->range, 0.9, 1e-12);
  EXPECT_EQ(hit->target, RayTarget::kBox);
  const auto wall = raycast(m, {1.0, 1.0}, {-1.0, 0.0}, 12.0);
  ASSERT_TRUE(wall);
  EXPECT_NEAR(wall->range, 1.0, 1e-12);
  EXPECT_EQ(wall->target, RayTarget::kWall);
  EXPECT_FALSE(raycast(m, {1.0, 1.0}, {-1.0, 0.0}, 0.5));
  EXPECT_THROW(raycast(m, {1.0, 1.0}, {2.0, 0.0}, 12.0), std::invalid_argument);
  EXPECT_THROW(raycast(m, {1.0, 1.0}, {1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST(Raycast, MatchesBruteForceOracle) {
  oracle::Gen gen(41);
  for (int scene = 0; scene < 1000; ++scene) {
    std::vector<DynamicBox> boxes;
    const int n = gen.integer(0, 6);
    for (int i = 0; i < n; ++i) {
      DynamicBox b = box_at(gen.uniform(0.3, 5.1), gen.uniform(0.3, 5.1),
                            gen.uniform(-3.1, 3.1));
      b.half_extent = gen.uniform(0.05, 0.3);
      boxes.push_back(b);
    }
    const WorldMap m(1.8, std::vector(3, std::vector(3, Tile{})), boxes,
                     gen.coin(), false);
    const auto segs = scene_segments(m);
    const Vector2 o(gen.uniform(0.01, 5.39), gen.uniform(0.01, 5.39));
    const double th = gen.uniform(-3.2, 3.2);
    const Vector2 d(std::cos(th), std::sin(th));
    const auto got = raycast(m, o, d, 12.0);
    const auto want = oracle::nearest_hit(o, d, segs);
    if (!want || *want > 12.0) {
      ASSERT_FALSE(got) << "scene " << scene;
    } else {
      ASSERT_TRUE(got) << "scene " << scene;
      ASSERT_NEAR(got->range, *want, 1e-9) << "scene " << scene;
    }
  }
}

TEST(Raycast, MovingTargetCloserShortensRange) {
  for (double x = 3.0; x > 1.2; x -= 0.1) {
    const WorldMap far = walled(1.8, 3, {box_at(x, 1.0)});
    const WorldMap near = walled(1.8, 3, {box_at(x - 0.05, 1.0)});
    EXPECT_LT(raycast(near, {1.0, 1.0}, {1, 0}, 12.0)->range,
              raycast(far, {1.0, 1.0}, {1, 0}, 12.0)->range);
  }
}

TEST(Contacts, BoxContactExamples) {
  const OrientedBox a{{0, 0}, {0.1, 0.1}, 0.0};
  const OrientedBox b{{0.15, 0}, {0.1, 0.1}, 0.0};
  const Contact c = box_contact(a, b);
  EXPECT_NEAR(c.depth, 0.05, 1e-12);
  EXPECT_NEAR(c.normal.x(), 1.0, 1e-12);
  const OrientedBox far{{0.5, 0}, {0.1, 0.1}, 0.0};
  EXPECT_LE(box_contact(a, far).depth, 0.0);
}

TEST(Contacts, WallPenetration) {
  const WorldMap m = walled(1.8, 1);
  const OrientedBox inside{{0.9, 0.9}, {0.1, 0.1}, 0.0};
  const OrientedBox poking{{0.05, 0.9}, {0.1, 0.1}, 0.0};
  double deepest = 0.0;
  for (const auto& w : m.walls()) {
    EXPECT_LE(wall_penetration(w, inside), 0.0);
    deepest = std::max(deepest, wall_penetration(w, poking));
  }
  EXPECT_NEAR(deepest, 0.05, 1e-12);
}

TEST(Collisions, NoContactIsIdentity) {
  WorldMap m = walled(1.8, 3, {box_at(4.0, 4.0)});
  const WorldMap before = m;
  const OrientedBox car = vehicle_body(Pose2D(1.0, 1.0, 0.0), VehicleGeometry{});
  const CollisionOutcome out = resolve_collisions(m, car, {0.3, 0.0}, 0.005);
  EXPECT_FALSE(out.contact);
  EXPECT_EQ(out.vehicle_displacement, Vector2::Zero());
  EXPECT_EQ(out.vehicle_velocity, Vector2(0.3, 0.0));
  EXPECT_EQ(m.boxes(), before.boxes());
}

TEST(Collisions, PushesBoxAndKeepsWallsFixed) {
  WorldMap m = walled(1.8, 3, {box_at(1.40, 1.0)});
  const auto walls = m.walls();
  // Car body spans x in [1.0, 1.3] at pose x = 1.0; the box face is at 1.30.
  Pose2D pose(1.0, 1.0, 0.0);
  const VehicleGeometry g;
  for (int i = 0; i < 200; ++i) {
    pose.position.x() += 0.4 * 0.005;
    const auto out = resolve_collisions(m, vehicle_body(pose, g), {0.4, 0.0}, 0.005);
    pose.position += out.vehicle_displacement;
    ASSERT_LT(max_overlap(m, vehicle_body(pose, g)), 1e-4);
  }
  EXPECT_GT(m.boxes()[0].center.x(), 1.5);
  EXPECT_EQ(m.walls(), walls);
}

TEST(Collisions, WallStopsVehicle) {
  WorldMap m = walled(1.8, 1);
  Pose2D pose(1.2, 0.9, 0.0);
  const VehicleGeometry g;
  for (int i = 0; i < 400; ++i) {
    pose.position.x() += 0.4 * 0.005;
    const auto out = resolve_collisions(m, vehicle_body(pose, g), {0.4, 0.0}, 0.005);
    pose.position += out.vehicle_displacement;
    ASSERT_LT(max_overlap(m, vehicle_body(pose, g)), 1e-4);
  }
  // Front face at pose.x + body length may touch the wall at 1.8 but not pass.
  EXPECT_LE(pose.x() + g.body_length, 1.8 + 1e-4);
  EXPECT_GT(pose.x() + g.body_length, 1.79);
}

TEST(Collisions, RandomScenesLeaveNoOverlap) {
  oracle::Gen gen(42);
  const VehicleGeometry g;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<DynamicBox> boxes;
    for (int i = 0; i < 4; ++i) {
      boxes.push_back(box_at(gen.uniform(0.6, 3.0), gen.uniform(0.6, 3.0),
                             gen.uniform(-3, 3)));
    }
    WorldMap m = walled(1.8, 2, boxes);
    Pose2D pose(gen.uniform(0.6, 3.0), gen.uniform(0.6, 3.0), gen.uniform(-3, 3));
    const Vector2 v = 0.4 * heading(pose.yaw);
    const auto out = resolve_collisions(m, vehicle_body(pose, g), v, 0.005);
    pose.position += out.vehicle_displacement;
    ASSERT_LT(max_overlap(m, vehicle_body(pose, g)), 1e-4) << "trial " << trial;
  }
}
