#include "minidrive/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace minidrive {
namespace {

double cross(const Vector2& a, const Vector2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Half-width of the box's shadow on a unit axis.
double projected_radius(const OrientedBox& box, const Vector2& axis) {
  const Mat2<double> r = rotation(box.yaw);
  return box.half_extents.x() * std::abs(r.col(0).dot(axis)) +
         box.half_extents.y() * std::abs(r.col(1).dot(axis));
}

struct Body {
  OrientedBox shape;
  double inv_mass;
  Vector2 velocity;
};

bool may_touch(const OrientedBox& a, const OrientedBox& b) {
  const double reach = a.half_extents.norm() + b.half_extents.norm();
  return (b.center - a.center).squaredNorm() <= reach * reach;
}

}  // namespace

std::array<Vector2, 4> OrientedBox::corners() const {
  const Mat2<double> r = rotation(yaw);
  const double hx = half_extents.x();
  const double hy = half_extents.y();
  return {center + r * Vector2(hx, hy), center + r * Vector2(-hx, hy),
          center + r * Vector2(-hx, -hy), center + r * Vector2(hx, -hy)};
}

OrientedBox box_shape(const DynamicBox& box) {
  return {box.center, Vector2::Constant(box.half_extent), box.yaw};
}

OrientedBox vehicle_body(const Pose2D& pose, const VehicleGeometry& geom) {
  return {body_to_world(pose, geom.body_center_offset()),
          Vector2(geom.body_length / 2.0, geom.body_width / 2.0), pose.yaw};
}

std::optional<double> ray_box_distance(const OrientedBox& box,
                                       const Vector2& origin,
                                       const Vector2& direction) {
  const Mat2<double> r_t = rotation(box.yaw).transpose();
  const Vector2 o = r_t * (origin - box.center);
  const Vector2 d = r_t * direction;
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const double h = box.half_extents[i];
    if (d[i] == 0.0) {
      if (std::abs(o[i]) > h) return std::nullopt;
      continue;
    }
    double t1 = (-h - o[i]) / d[i];
    double t2 = (h - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    t_enter = std::max(t_enter, t1);
    t_exit = std::min(t_exit, t2);
    if (t_enter > t_exit) return std::nullopt;
  }
  if (t_exit < 0.0) return std::nullopt;
  return t_enter >= 0.0 ? t_enter : t_exit;
}

std::optional<double> ray_segment_distance(const Vector2& a, const Vector2& b,
                                           const Vector2& origin,
                                           const Vector2& direction) {
  const Vector2 edge = b - a;
  const double denom = cross(direction, edge);
  if (denom == 0.0) return std::nullopt;
  const Vector2 to_a = a - origin;
  const double t = cross(to_a, edge) / denom;
  const double u = cross(to_a, direction) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

std::optional<RayHit> raycast(const WorldMap& map, const Vector2& origin,
                              const Vector2& direction, double max_range) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("raycast: direction must be a unit vector");
  }
  if (!(max_range > 0.0)) {
    throw std::invalid_argument("raycast: max_range must be positive");
  }
  std::optional<RayHit> best;
  const auto consider = [&](std::optional<double> t, RayTarget target,
                            int index) {
    if (t && *t <= max_range && (!best || *t < best->range)) {
      best = RayHit{*t, target, index};
    }
  };
  const auto& boxes = map.boxes();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    consider(ray_box_distance(box_shape(boxes[i]), origin, direction),
             RayTarget::kBox, static_cast<int>(i));
  }
  const auto& walls = map.walls();
  for (std::size_t i = 0; i < walls.size(); ++i) {
    consider(ray_segment_distance(walls[i].a, walls[i].b, origin, direction),
             RayTarget::kWall, static_cast<int>(i));
  }
  return best;
}

Contact box_contact(const OrientedBox& a, const OrientedBox& b) {
  const Mat2<double> ra = rotation(a.yaw);
  const Mat2<double> rb = rotation(b.yaw);
  const std::array<Vector2, 4> axes = {ra.col(0), ra.col(1), rb.col(0),
                                       rb.col(1)};
  const Vector2 offset = b.center - a.center;
  Contact best;
  best.depth = std::numeric_limits<double>::infinity();
  for (const Vector2& axis : axes) {
    const double dist = offset.dot(axis);
    const double overlap =
        projected_radius(a, axis) + projected_radius(b, axis) - std::abs(dist);
    if (overlap < best.depth) {
      best.depth = overlap;
      best.normal = dist < 0.0 ? Vector2(-axis) : axis;
    }
    if (overlap <= 0.0) break;
  }
  return best;
}

double wall_penetration(const WallSegment& wall, const OrientedBox& box) {
  const double center_distance = (box.center - wall.a).dot(wall.inward_normal);
  return projected_radius(box, wall.inward_normal) - center_distance;
}

CollisionOutcome resolve_collisions(WorldMap& map, const OrientedBox& vehicle,
                                    const Vector2& vehicle_velocity, double dt,
                                    const CollisionParams& params) {
  auto& boxes = map.mutable_boxes();
  for (DynamicBox& box : boxes) {
    if (box.velocity.isZero(0.0)) continue;
    box.center += box.velocity * dt;
    const double speed = box.velocity.norm();
    const double dv = params.box_friction_decel * dt;
    box.velocity = speed <= dv ? Vector2::Zero().eval()
                               : Vector2(box.velocity * (1.0 - dv / speed));
  }

  std::vector<Body> bodies;
  bodies.reserve(boxes.size() + 1);
  bodies.push_back({vehicle, 1.0 / params.vehicle_mass, vehicle_velocity});
  for (const DynamicBox& box : boxes) {
    bodies.push_back({box_shape(box), 1.0 / box.mass, box.velocity});
  }

  CollisionOutcome out;
  const double converged = params.slop * 1e-2;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    double worst = 0.0;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      for (std::size_t j = i + 1; j < bodies.size(); ++j) {
        Body& a = bodies[i];
        Body& b = bodies[j];
        if (!may_touch(a.shape, b.shape)) continue;
        const Contact c = box_contact(a.shape, b.shape);
        if (c.depth <= 0.0) continue;
        worst = std::max(worst, c.depth);
        if (i == 0) out.contact = true;
        const double inv_total = a.inv_mass + b.inv_mass;
        a.shape.center -= c.normal * (c.depth * a.inv_mass / inv_total);
        b.shape.center += c.normal * (c.depth * b.inv_mass / inv_total);
        const double approach = (b.velocity - a.velocity).dot(c.normal);
        if (approach < 0.0) {
          const double impulse = -approach / inv_total;
          a.velocity -= c.normal * (impulse * a.inv_mass);
          b.velocity += c.normal * (impulse * b.inv_mass);
        }
      }
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      Body& body = bodies[i];
      for (const WallSegment& wall : map.walls()) {
        const double depth = wall_penetration(wall, body.shape);
        if (depth <= 0.0) continue;
        worst = std::max(worst, depth);
        if (i == 0) out.contact = true;
        body.shape.center += wall.inward_normal * depth;
        const double approach = body.velocity.dot(wall.inward_normal);
        if (approach < 0.0) body.velocity -= wall.inward_normal * approach;
      }
    }
    if (worst <= converged) break;
  }

  out.vehicle_displacement = bodies[0].shape.center - vehicle.center;
  out.vehicle_velocity = bodies[0].velocity;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    boxes[i].center = bodies[i + 1].shape.center;
    boxes[i].velocity = bodies[i + 1].velocity;
  }
  return out;
}

double max_overlap(const WorldMap& map, const OrientedBox& vehicle) {
  std::vector<OrientedBox> shapes{vehicle};
  for (const DynamicBox& box : map.boxes()) shapes.push_back(box_shape(box));
  double worst = 0.0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    for (std::size_t j = i + 1; j < shapes.size(); ++j) {
      worst = std::max(worst, box_contact(shapes[i], shapes[j]).depth);
    }
    for (const WallSegment& wall : map.walls()) {
      worst = std::max(worst, wall_penetration(wall, shapes[i]));
    }
  }
  return worst;
}

}  // namespace minidrive
