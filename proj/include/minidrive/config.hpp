#pragma once

// Simulator configuration file: a JSON object using the same conventions as
// the map file. Every key is optional; absent keys keep the base value.
//
//   {
//     "dt": 0.005, "lidar_rate": 7, "telemetry_rate": 30,
//     "map": "maps/tinytown.map",
//     "initial_pose": {"x": 0, "y": 0, "yaw": 0},
//     "geometry": {"wheelbase": 0.3, "track": 0.16, ...},
//     "limits": {"steering_max": 0.5236, "drive_max_rpm": 130, ...},
//     "lidar": {"min_range": 0.15, "max_range": 12, "mount_offset": [0, 0]},
//     "collision": {"vehicle_mass": 1.0, ...},
//     "ips_noise_std": 0, "noise_seed": 1
//   }

#include <string>

#include "json.hpp"
#include "minidrive/simulator.hpp"

namespace minidrive {

inline constexpr const char* kConfigEnvVar = "MINIDRIVE_CONFIG";

/// Throws std::invalid_argument on type errors or invalid values.
SimConfig sim_config_from_json(const nlohmann::json& doc, SimConfig base = {});
nlohmann::ordered_json sim_config_to_json(const SimConfig& config);

SimConfig load_sim_config_file(const std::string& path, SimConfig base = {});

}  // namespace minidrive
