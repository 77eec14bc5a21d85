#pragma once

// Modular tile map: typed, rotated road modules on a square grid, optional
// boundary walls, and movable construction boxes.
//
// Grid row 0 is the northern (top, +Y) row. Tile (r, c) covers
//   x in [c * s, (c + 1) * s],  y in [(rows - 1 - r) * s, (rows - r) * s]
// with s = tile_size, so the map spans [0, cols * s] x [0, rows * s].

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minidrive/core.hpp"

namespace minidrive {

enum class TileType {
  kDeadEnd,
  kStraight,
  kCurved,
  kIntersection3Way,
  kIntersection4Way,
  kRoadsideParking,
  kParkingLot,
  kLawn,
};

inline constexpr std::array<TileType, 8> kAllTileTypes = {
    TileType::kDeadEnd,          TileType::kStraight,
    TileType::kCurved,           TileType::kIntersection3Way,
    TileType::kIntersection4Way, TileType::kRoadsideParking,
    TileType::kParkingLot,       TileType::kLawn,
};

std::string_view to_string(TileType type);
std::optional<TileType> parse_tile_type(std::string_view name);
bool is_drivable(TileType type);

/// Tile sides, in counter-clockwise order starting east.
enum class Side : std::uint8_t { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3 };

inline constexpr std::array<Side, 4> kAllSides = {Side::kEast, Side::kNorth,
                                                  Side::kWest, Side::kSouth};

std::string_view to_string(Side side);
Side opposite(Side side);

/// Bit i set means side i carries an open road edge.
using SideMask = std::uint8_t;

constexpr SideMask side_bit(Side side) {
  return static_cast<SideMask>(1u << static_cast<unsigned>(side));
}

/// Open road edges of a module at rotation 0.
SideMask base_open_sides(TileType type);

/// Open road edges after rotating the module CCW by `rotation_deg`
/// (0, 90, 180 or 270).
SideMask open_sides(TileType type, int rotation_deg);

struct Tile {
  TileType type = TileType::kLawn;
  int rotation_deg = 0;

  friend bool operator==(const Tile&, const Tile&) = default;
};

/// Road layout constants. Two 0.3 m lanes; curved modules turn about the
/// tile corner so the lane centrelines sit at s/2 -/+ road_width/4.
inline constexpr double kRoadWidth = 0.6;
/// Smallest lane-centreline radius the car can hold at full lock.
inline constexpr double kMinRoadCurvatureRadius = 0.6;
inline constexpr double kDefaultTileSize = 1.8;

double inner_lane_radius(double tile_size);

struct DynamicBox {
  Vector2 center = Vector2::Zero();
  double half_extent = 0.1;
  double yaw = 0.0;
  double mass = 0.25;
  Vector2 velocity = Vector2::Zero();

  friend bool operator==(const DynamicBox&, const DynamicBox&) = default;
};

struct WallSegment {
  Vector2 a;
  Vector2 b;
  Vector2 inward_normal;

  friend bool operator==(const WallSegment&, const WallSegment&) = default;
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WorldMap {
 public:
  /// Throws MapError for a non-rectangular or empty grid, a bad rotation, or
  /// a non-positive tile size.
  WorldMap(double tile_size, std::vector<std::vector<Tile>> grid,
           std::vector<DynamicBox> boxes, bool bounds_wall, bool require_loop);

  double tile_size() const { return tile_size_; }
  int rows() const { return static_cast<int>(grid_.size()); }
  int cols() const { return static_cast<int>(grid_.front().size()); }
  const Tile& tile(int row, int col) const { return grid_.at(row).at(col); }
  const std::vector<std::vector<Tile>>& grid() const { return grid_; }
  bool bounds_wall() const { return bounds_wall_; }
  bool require_loop() const { return require_loop_; }

  double width() const { return cols() * tile_size_; }
  double height() const { return rows() * tile_size_; }

  /// Lower-left corner of tile (row, col) in world coordinates.
  Vector2 tile_origin(int row, int col) const;

  /// Boundary wall segments; empty unless bounds_wall is set.
  const std::vector<WallSegment>& walls() const { return walls_; }

  const std::vector<DynamicBox>& boxes() const { return boxes_; }
  std::vector<DynamicBox>& mutable_boxes() { return boxes_; }

 private:
  double tile_size_;
  std::vector<std::vector<Tile>> grid_;
  std::vector<DynamicBox> boxes_;
  bool bounds_wall_;
  bool require_loop_;
  std::vector<WallSegment> walls_;
};

/// Parses the JSON map format. Throws MapError on any schema violation.
WorldMap load_map(std::string_view text);
WorldMap load_map_file(const std::string& path);

/// Serializes back to the map file format (boxes at their current centres).
std::string dump_map(const WorldMap& map);

enum class MapRule { kConnectivity, kCurvature, kClosedLoop };

std::string_view to_string(MapRule rule);

struct Violation {
  MapRule rule;
  int row = -1;  // -1 when the violation is not tied to a tile
  int col = -1;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(const Violation& v);

/// Checks connectivity, minimum curvature and (when the map requires it)
/// the presence of a closed loop. Never mutates the map.
std::vector<Violation> validate(const WorldMap& map);

/// True when the graph of mutually-open drivable tiles contains a cycle.
bool has_closed_loop(const WorldMap& map);

}  // namespace minidrive
