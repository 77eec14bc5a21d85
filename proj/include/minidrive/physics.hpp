#pragma once

// Planar contact and ray queries against the world's solid geometry.
// Flat road tiles are never solid: only construction boxes and the optional
// boundary walls participate.

#include <array>
#include <optional>

#include "minidrive/environment.hpp"

namespace minidrive {

struct OrientedBox {
  Vector2 center = Vector2::Zero();
  Vector2 half_extents = Vector2::Zero();
  double yaw = 0.0;

  std::array<Vector2, 4> corners() const;
};

OrientedBox box_shape(const DynamicBox& box);

/// Footprint of the car body for a rear-reference pose.
OrientedBox vehicle_body(const Pose2D& pose, const VehicleGeometry& geom);

enum class RayTarget { kBox, kWall };

struct RayHit {
  double range = 0.0;
  RayTarget target = RayTarget::kBox;
  int index = -1;  // box or wall index
};

/// Nearest boundary crossing along origin + t * direction, 0 <= t <= max_range.
/// Returns std::nullopt for a miss.
std::optional<RayHit> raycast(const WorldMap& map, const Vector2& origin,
                              const Vector2& direction, double max_range);

/// Ray entry/exit distance through an oriented box, slab method.
std::optional<double> ray_box_distance(const OrientedBox& box,
                                       const Vector2& origin,
                                       const Vector2& direction);

std::optional<double> ray_segment_distance(const Vector2& a, const Vector2& b,
                                           const Vector2& origin,
                                           const Vector2& direction);

/// Separating-axis penetration between two boxes. `normal` points from a
/// toward b; depth <= 0 means no overlap.
struct Contact {
  Vector2 normal = Vector2::UnitX();
  double depth = 0.0;
};

Contact box_contact(const OrientedBox& a, const OrientedBox& b);

/// Penetration of a box through the wall's line, along the wall's inward
/// normal. depth <= 0 means no overlap.
double wall_penetration(const WallSegment& wall, const OrientedBox& box);

struct CollisionParams {
  double vehicle_mass = 1.0;        // kg
  double box_friction_decel = 3.0;  // m/s^2, ground friction on boxes
  double slop = 1e-4;               // m, allowed residual overlap
  int max_iterations = 64;

  friend bool operator==(const CollisionParams&,
                         const CollisionParams&) = default;
};

struct CollisionOutcome {
  Vector2 vehicle_displacement = Vector2::Zero();
  Vector2 vehicle_velocity = Vector2::Zero();
  bool contact = false;
};

/// Advances the construction boxes by dt and separates every overlapping
/// pair. Walls are immovable; vehicle/box and box/box contacts split the
/// correction by inverse mass and cancel the approaching normal velocity
/// (restitution 0). Box yaw is not changed by contact.
CollisionOutcome resolve_collisions(WorldMap& map, const OrientedBox& vehicle,
                                    const Vector2& vehicle_velocity, double dt,
                                    const CollisionParams& params = {});

/// Largest overlap among all body pairs (vehicle, boxes, walls).
double max_overlap(const WorldMap& map, const OrientedBox& vehicle);

}  // namespace minidrive
