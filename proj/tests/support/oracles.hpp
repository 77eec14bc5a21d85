#pragma once

// Reference computations written independently of the library code paths
// they check. Plain loops and closed forms only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

struct Circle {
  Eigen::Vector2d center;
  double radius;
};

/// Algebraic (Kasa) least-squares circle fit.
inline Circle fit_circle(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd rhs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = pts[i].x();
    a(i, 1) = pts[i].y();
    a(i, 2) = 1.0;
    rhs(i) = -(pts[i].squaredNorm());
  }
  const Eigen::Vector3d s = a.colPivHouseholderQr().solve(rhs);
  Circle c;
  c.center = Eigen::Vector2d(-s(0) / 2.0, -s(1) / 2.0);
  c.radius = std::sqrt(c.center.squaredNorm() - s(2));
  return c;
}

/// Corners of a square box of half-extent h rotated by yaw, CCW order.
inline std::array<Eigen::Vector2d, 4> square_corners(const Eigen::Vector2d& c,
                                                     double hx, double hy,
                                                     double yaw) {
  const double cs = std::cos(yaw);
  const double sn = std::sin(yaw);
  const double lx[4] = {hx, -hx, -hx, hx};
  const double ly[4] = {hy, hy, -hy, -hy};
  std::array<Eigen::Vector2d, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = c + Eigen::Vector2d(cs * lx[i] - sn * ly[i], sn * lx[i] + cs * ly[i]);
  }
  return out;
}

inline void append_box_edges(std::vector<Segment>& segs,
                             const Eigen::Vector2d& c, double hx, double hy,
                             double yaw) {
  const auto k = square_corners(c, hx, hy, yaw);
  for (int i = 0; i < 4; ++i) segs.push_back({k[i], k[(i + 1) % 4]});
}

/// Ray parameter t >= 0 where origin + t*dir crosses segment ab, by
/// Cramer's rule on the 2x2 system.
inline std::optional<double> ray_hits_segment(const Eigen::Vector2d& o,
                                              const Eigen::Vector2d& d,
                                              const Segment& s) {
  const Eigen::Vector2d e = s.b - s.a;
  const double det = d.x() * (-e.y()) - d.y() * (-e.x());
  if (std::abs(det) < 1e-15) return std::nullopt;
  const Eigen::Vector2d r = s.a - o;
  const double t = (r.x() * (-e.y()) - r.y() * (-e.x())) / det;
  const double u = (d.x() * r.y() - d.y() * r.x()) / det;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

inline std::optional<double> nearest_hit(const Eigen::Vector2d& o,
                                         const Eigen::Vector2d& d,
                                         const std::vector<Segment>& segs) {
  std::optional<double> best;
  for (const Segment& s : segs) {
    if (auto t = ray_hits_segment(o, d, s); t && (!best || *t < *best)) best = t;
  }
  return best;
}

/// Expected range and intensity of one LIDAR ray.
inline std::pair<double, double> lidar_ray(const Eigen::Vector2d& o,
                                           double azimuth,
                                           const std::vector<Segment>& segs,
                                           double min_range, double max_range) {
  const Eigen::Vector2d d(std::cos(azimuth), std::sin(azimuth));
  const auto t = nearest_hit(o, d, segs);
  if (!t || *t > max_range) return {max_range, 0.0};
  if (*t < min_range) return {min_range, 0.0};
  return {*t, 1.0 - *t / max_range};
}

/// Cycle detection in an undirected graph by depth-first search.
inline bool has_cycle(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> parent(n, -2);
  for (int root = 0; root < n; ++root) {
    if (parent[root] != -2) continue;
    std::vector<int> stack{root};
    parent[root] = -1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (v == parent[u]) continue;
        if (parent[v] != -2) return true;
        parent[v] = u;
        stack.push_back(v);
      }
    }
  }
  return false;
}

/// Deterministic generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
