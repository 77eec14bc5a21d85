#include "minidrive/environment.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace minidrive {
namespace {

using Json = nlohmann::json;

constexpr std::array<std::string_view, 8> kTileNames = {
    "dead_end",          "straight",          "curved",
    "intersection_3way", "intersection_4way", "roadside_parking",
    "parking_lot",       "lawn",
};

bool valid_rotation(int deg) {
  return deg == 0 || deg == 90 || deg == 180 || deg == 270;
}

Tile parse_tile(const Json& cell, int row, int col) {
  const auto where = [&] {
    return " at (" + std::to_string(row) + "," + std::to_string(col) + ")";
  };
  if (!cell.is_string()) throw MapError("grid cell is not a string" + where());
  const std::string text = cell.get<std::string>();
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw MapError("grid cell '" + text + "' lacks ':<rotation>'" + where());
  }
  const auto type = parse_tile_type(std::string_view(text).substr(0, colon));
  if (!type) {
    throw MapError("unknown tile type '" + text.substr(0, colon) + "'" +
                   where());
  }
  int rotation = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, rotation);
  if (ec != std::errc() || ptr != last || first == last) {
    throw MapError("bad rotation in '" + text + "'" + where());
  }
  if (!valid_rotation(rotation)) {
    throw MapError("rotation must be 0, 90, 180 or 270 in '" + text + "'" +
                   where());
  }
  return {*type, rotation};
}

double number_field(const Json& obj, const char* key, double fallback,
                    bool required) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw MapError(std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!it->is_number()) {
    throw MapError(std::string("key '") + key + "' must be a number");
  }
  return it->get<double>();
}

bool bool_field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) {
    throw MapError(std::string("key '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  /// Returns false when a and b were already joined.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// (row, col) step for each side; row 0 is north.
constexpr std::array<std::array<int, 2>, 4> kSideStep = {{
    {0, 1},   // east
    {-1, 0},  // north
    {0, -1},  // west
    {1, 0},   // south
}};

}  // namespace

std::string_view to_string(TileType type) {
  return kTileNames[static_cast<std::size_t>(type)];
}

std::optional<TileType> parse_tile_type(std::string_view name) {
  for (std::size_t i = 0; i < kTileNames.size(); ++i) {
    if (kTileNames[i] == name) return static_cast<TileType>(i);
  }
  return std::nullopt;
}

bool is_drivable(TileType type) { return type != TileType::kLawn; }

std::string_view to_string(Side side) {
  constexpr std::array<std::string_view, 4> kNames = {"east", "north", "west",
                                                      "south"};
  return kNames[static_cast<std::size_t>(side)];
}

Side opposite(Side side) {
  return static_cast<Side>((static_cast<unsigned>(side) + 2u) % 4u);
}

SideMask base_open_sides(TileType type) {
  using enum Side;
  switch (type) {
    case TileType::kDeadEnd:
      return side_bit(kEast);
    case TileType::kStraight:
    case TileType::kRoadsideParking:
      return side_bit(kEast) | side_bit(kWest);
    case TileType::kCurved:
      return side_bit(kEast) | side_bit(kNorth);
    case TileType::kIntersection3Way:
      return side_bit(kEast) | side_bit(kWest) | side_bit(kSouth);
    case TileType::kIntersection4Way:
      return 0x0F;
    case TileType::kParkingLot:
      return side_bit(kSouth);
    case TileType::kLawn:
      return 0;
  }
  return 0;
}

SideMask open_sides(TileType type, int rotation_deg) {
  if (!valid_rotation(rotation_deg)) {
    throw MapError("rotation must be 0, 90, 180 or 270");
  }
  const unsigned quarter_turns = static_cast<unsigned>(rotation_deg / 90);
  const unsigned mask = base_open_sides(type);
  return static_cast<SideMask>(
      ((mask << quarter_turns) | (mask >> (4u - quarter_turns))) & 0x0Fu);
}

double inner_lane_radius(double tile_size) {
  return tile_size / 2.0 - kRoadWidth / 4.0;
}

WorldMap::WorldMap(double tile_size, std::vector<std::vector<Tile>> grid,
                   std::vector<DynamicBox> boxes, bool bounds_wall,
                   bool require_loop)
    : tile_size_(tile_size),
      grid_(std::move(grid)),
      boxes_(std::move(boxes)),
      bounds_wall_(bounds_wall),
      require_loop_(require_loop) {
  if (!(tile_size_ > kRoadWidth) || !std::isfinite(tile_size_)) {
    throw MapError("tile_size must exceed the road width (0.6 m)");
  }
  if (grid_.empty() || grid_.front().empty()) {
    throw MapError("grid must have at least one row and one column");
  }
  const std::size_t cols = grid_.front().size();
  for (std::size_t r = 0; r < grid_.size(); ++r) {
    if (grid_[r].size() != cols) {
      throw MapError("non-rectangular grid: row " + std::to_string(r) +
                     " has " + std::to_string(grid_[r].size()) +
                     " cells, expected " + std::to_string(cols));
    }
    for (const Tile& t : grid_[r]) {
      if (!valid_rotation(t.rotation_deg)) {
        throw MapError("rotation must be 0, 90, 180 or 270");
      }
    }
  }
  for (const DynamicBox& b : boxes_) {
    if (!(b.mass > 0.0) || !(b.half_extent > 0.0)) {
      throw MapError("construction boxes need positive mass and size");
    }
  }
  if (bounds_wall_) {
    const double w = width();
    const double h = height();
    walls_ = {
        {{0.0, 0.0}, {w, 0.0}, {0.0, 1.0}},
        {{w, 0.0}, {w, h}, {-1.0, 0.0}},
        {{w, h}, {0.0, h}, {0.0, -1.0}},
        {{0.0, h}, {0.0, 0.0}, {1.0, 0.0}},
    };
  }
}

Vector2 WorldMap::tile_origin(int row, int col) const {
  return {col * tile_size_, (rows() - 1 - row) * tile_size_};
}

WorldMap load_map(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MapError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw MapError("map must be a JSON object");

  const double tile_size =
      number_field(doc, "tile_size", kDefaultTileSize, false);

  const auto grid_it = doc.find("grid");
  if (grid_it == doc.end()) throw MapError("missing key 'grid'");
  if (!grid_it->is_array()) throw MapError("'grid' must be an array of rows");
  std::vector<std::vector<Tile>> grid;
  for (std::size_t r = 0; r < grid_it->size(); ++r) {
    const Json& row = (*grid_it)[r];
    if (!row.is_array()) throw MapError("grid row is not an array");
    std::vector<Tile> tiles;
    for (std::size_t c = 0; c < row.size(); ++c) {
      tiles.push_back(parse_tile(row[c], static_cast<int>(r),
                                 static_cast<int>(c)));
    }
    grid.push_back(std::move(tiles));
  }

  std::vector<DynamicBox> boxes;
  if (const auto it = doc.find("boxes"); it != doc.end()) {
    if (!it->is_array()) throw MapError("'boxes' must be an array");
    for (const Json& b : *it) {
      if (!b.is_object()) throw MapError("box entries must be objects");
      DynamicBox box;
      box.center = {number_field(b, "x", 0.0, true),
                    number_field(b, "y", 0.0, true)};
      box.yaw = wrap_angle(number_field(b, "yaw", 0.0, false));
      boxes.push_back(box);
    }
  }

  return WorldMap(tile_size, std::move(grid), std::move(boxes),
                  bool_field(doc, "bounds_wall"),
                  bool_field(doc, "require_loop"));
}

WorldMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_map(buffer.str());
}

std::string dump_map(const WorldMap& map) {
  nlohmann::ordered_json doc;
  doc["tile_size"] = map.tile_size();
  doc["require_loop"] = map.require_loop();
  doc["bounds_wall"] = map.bounds_wall();
  auto grid = nlohmann::ordered_json::array();
  for (const auto& row : map.grid()) {
    auto cells = nlohmann::ordered_json::array();
    for (const Tile& t : row) {
      cells.push_back(std::string(to_string(t.type)) + ":" +
                      std::to_string(t.rotation_deg));
    }
    grid.push_back(std::move(cells));
  }
  doc["grid"] = std::move(grid);
  auto boxes = nlohmann::ordered_json::array();
  for (const DynamicBox& b : map.boxes()) {
    boxes.push_back(
        {{"x", b.center.x()}, {"y", b.center.y()}, {"yaw", b.yaw}});
  }
  doc["boxes"] = std::move(boxes);
  return doc.dump();
}

std::string_view to_string(MapRule rule) {
  switch (rule) {
    case MapRule::kConnectivity:
      return "connectivity";
    case MapRule::kCurvature:
      return "curvature";
    case MapRule::kClosedLoop:
      return "closed_loop";
  }
  return "unknown";
}

std::string to_string(const Violation& v) {
  std::string out(to_string(v.rule));
  if (v.row >= 0) {
    out += " (" + std::to_string(v.row) + "," + std::to_string(v.col) + ")";
  }
  return out + ": " + v.detail;
}

bool has_closed_loop(const WorldMap& map) {
  DisjointSets sets(map.rows() * map.cols());
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Tile& t = map.tile(r, c);
      if (!is_drivable(t.type)) continue;
      const SideMask open = open_sides(t.type, t.rotation_deg);
      // East and south links only, so each shared edge is visited once.
      for (const Side side : {Side::kEast, Side::kSouth}) {
        if (!(open & side_bit(side))) continue;
        const auto [dr, dc] = kSideStep[static_cast<std::size_t>(side)];
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr >= map.rows() || nc >= map.cols()) continue;
        const Tile& n = map.tile(nr, nc);
        if (!is_drivable(n.type) ||
            !(open_sides(n.type, n.rotation_deg) & side_bit(opposite(side)))) {
          continue;
        }
        if (!sets.unite(r * map.cols() + c, nr * map.cols() + nc)) {
          return true;
        }
      }
    }
  }
  return false;
}

std::vector<Violation> validate(const WorldMap& map) {
  std::vector<Violation> out;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Tile& t = map.tile(r, c);
      if (!is_drivable(t.type)) continue;
      const SideMask open = open_sides(t.type, t.rotation_deg);
      for (const Side side : kAllSides) {
        if (!(open & side_bit(side))) continue;
        const auto [dr, dc] = kSideStep[static_cast<std::size_t>(side)];
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nc < 0 || nr >= map.rows() || nc >= map.cols()) {
          out.push_back({MapRule::kConnectivity, r, c,
                         std::string(to_string(t.type)) + " open " +
                             std::string(to_string(side)) +
                             " edge leaves the map"});
          continue;
        }
        const Tile& n = map.tile(nr, nc);
        const bool matched =
            is_drivable(n.type) &&
            (open_sides(n.type, n.rotation_deg) & side_bit(opposite(side)));
        if (!matched) {
          out.push_back({MapRule::kConnectivity, r, c,
                         std::string(to_string(t.type)) + " open " +
                             std::string(to_string(side)) + " edge meets " +
                             std::string(to_string(n.type)) + " at (" +
                             std::to_string(nr) + "," + std::to_string(nc) +
                             ") with no road"});
        }
      }
      if (t.type == TileType::kCurved) {
        const double radius = inner_lane_radius(map.tile_size());
        if (radius < kMinRoadCurvatureRadius) {
          std::ostringstream detail;
          detail << "inner lane radius " << radius
                 << " m is below the 0.6 m minimum";
          out.push_back({MapRule::kCurvature, r, c, detail.str()});
        }
      }
    }
  }
  if (map.require_loop() && !has_closed_loop(map)) {
    out.push_back({MapRule::kClosedLoop, -1, -1,
                   "no closed loop through drivable tiles"});
  }
  return out;
}

}  // namespace minidrive
