#include "minidrive/core.hpp"

#include <string>

namespace minidrive {

void VehicleGeometry::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("vehicle geometry: ") + name +
                                  " must be positive");
    }
  };
  positive(wheelbase, "wheelbase");
  positive(track, "track");
  positive(body_length, "body_length");
  positive(body_width, "body_width");
  positive(wheel_radius, "wheel_radius");
  positive(lidar_height, "lidar_height");
  if (body_length < wheelbase) {
    throw std::invalid_argument(
        "vehicle geometry: body_length must be at least the wheelbase");
  }
}

}  // namespace minidrive
