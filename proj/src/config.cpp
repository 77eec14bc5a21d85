#include "minidrive/config.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace minidrive {
namespace {

using Json = nlohmann::json;

void read_number(const Json& obj, const char* key, double& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) {
    throw std::invalid_argument(std::string("config: '") + key +
                                "' must be a number");
  }
  out = it->get<double>();
}

const Json* section(const Json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) {
    throw std::invalid_argument(std::string("config: '") + key +
                                "' must be an object");
  }
  return &*it;
}

}  // namespace

SimConfig sim_config_from_json(const Json& doc, SimConfig base) {
  if (!doc.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  SimConfig c = std::move(base);
  read_number(doc, "dt", c.dt);
  read_number(doc, "lidar_rate", c.lidar.rate_hz);
  read_number(doc, "telemetry_rate", c.telemetry_rate);
  read_number(doc, "ips_noise_std", c.ips_noise_std);
  if (const auto it = doc.find("noise_seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) {
      throw std::invalid_argument("config: 'noise_seed' must be unsigned");
    }
    c.noise_seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("map"); it != doc.end()) {
    if (!it->is_string()) {
      throw std::invalid_argument("config: 'map' must be a string");
    }
    c.map_path = it->get<std::string>();
  }
  if (const Json* p = section(doc, "initial_pose")) {
    double x = c.initial_pose.x();
    double y = c.initial_pose.y();
    double yaw = c.initial_pose.yaw;
    read_number(*p, "x", x);
    read_number(*p, "y", y);
    read_number(*p, "yaw", yaw);
    c.initial_pose = Pose2D(x, y, yaw);
  }
  if (const Json* g = section(doc, "geometry")) {
    read_number(*g, "wheelbase", c.geometry.wheelbase);
    read_number(*g, "track", c.geometry.track);
    read_number(*g, "body_length", c.geometry.body_length);
    read_number(*g, "body_width", c.geometry.body_width);
    read_number(*g, "wheel_radius", c.geometry.wheel_radius);
    read_number(*g, "lidar_height", c.geometry.lidar_height);
  }
  if (const Json* l = section(doc, "limits")) {
    read_number(*l, "steering_max", c.limits.steering_max);
    read_number(*l, "drive_max_rpm", c.limits.drive_max_rpm);
    read_number(*l, "tau_drive", c.limits.tau_drive);
    read_number(*l, "tau_steer", c.limits.tau_steer);
    read_number(*l, "brake_decel", c.limits.brake_decel);
  }
  if (const Json* l = section(doc, "lidar")) {
    read_number(*l, "min_range", c.lidar.min_range);
    read_number(*l, "max_range", c.lidar.max_range);
    if (const auto it = l->find("mount_offset"); it != l->end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
          !(*it)[1].is_number()) {
        throw std::invalid_argument(
            "config: 'lidar.mount_offset' must be [x, y]");
      }
      c.lidar.mount_offset = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    }
  }
  if (const Json* k = section(doc, "collision")) {
    read_number(*k, "vehicle_mass", c.collision.vehicle_mass);
    read_number(*k, "box_friction_decel", c.collision.box_friction_decel);
    read_number(*k, "slop", c.collision.slop);
  }
  c.validate();
  return c;
}

nlohmann::ordered_json sim_config_to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["dt"] = c.dt;
  j["lidar_rate"] = c.lidar.rate_hz;
  j["telemetry_rate"] = c.telemetry_rate;
  j["map"] = c.map_path;
  j["initial_pose"] = {{"x", c.initial_pose.x()},
                       {"y", c.initial_pose.y()},
                       {"yaw", c.initial_pose.yaw}};
  j["geometry"] = {{"wheelbase", c.geometry.wheelbase},
                   {"track", c.geometry.track},
                   {"body_length", c.geometry.body_length},
                   {"body_width", c.geometry.body_width},
                   {"wheel_radius", c.geometry.wheel_radius},
                   {"lidar_height", c.geometry.lidar_height}};
  j["limits"] = {{"steering_max", c.limits.steering_max},
                 {"drive_max_rpm", c.limits.drive_max_rpm},
                 {"tau_drive", c.limits.tau_drive},
                 {"tau_steer", c.limits.tau_steer},
                 {"brake_decel", c.limits.brake_decel}};
  j["lidar"] = {{"min_range", c.lidar.min_range},
                {"max_range", c.lidar.max_range},
                {"mount_offset",
                 {c.lidar.mount_offset.x(), c.lidar.mount_offset.y()}}};
  j["collision"] = {{"vehicle_mass", c.collision.vehicle_mass},
                    {"box_friction_decel", c.collision.box_friction_decel},
                    {"slop", c.collision.slop}};
  j["ips_noise_std"] = c.ips_noise_std;
  j["noise_seed"] = c.noise_seed;
  return j;
}

SimConfig load_sim_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  SimConfig config = sim_config_from_json(doc, std::move(base));
  // A relative map path is relative to the config file.
  if (doc.contains("map") && !config.map_path.empty() &&
      std::filesystem::path(config.map_path).is_relative()) {
    config.map_path =
        (std::filesystem::path(path).parent_path() / config.map_path).string();
  }
  return config;
}

}  // namespace minidrive
