#include "minidrive/bridge/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace minidrive::bridge {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

template <typename Derived>
OrderedJson to_array(const Eigen::MatrixBase<Derived>& v) {
  auto a = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const Json& require(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ProtocolError(std::string("missing field '") + key + "'");
  }
  return *it;
}

double number(const Json& value, const char* key) {
  if (!value.is_number()) {
    throw ProtocolError(std::string("field '") + key + "' must be a number");
  }
  return value.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const Json& obj, const char* key) {
  const Json& a = require(obj, key);
  if (!a.is_array() || a.size() != static_cast<std::size_t>(N)) {
    throw ProtocolError(std::string("field '") + key + "' must have " +
                        std::to_string(N) + " elements");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(a[i], key);
  return v;
}

template <typename Enum>
Enum enum_field(const Json& value, const char* key, int max_value) {
  const double raw = number(value, key);
  return static_cast<Enum>(
      std::clamp(static_cast<int>(std::lround(raw)), 0, max_value));
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
}

std::string type_of(const Json& doc) {
  if (!doc.is_object()) throw ProtocolError("frame is not a JSON object");
  const auto it = doc.find("type");
  if (it == doc.end() || !it->is_string()) {
    throw ProtocolError("frame has no string 'type'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string encode_telemetry(const Telemetry& t) {
  OrderedJson j;
  j["type"] = "telemetry";
  j["v"] = kProtocolVersion;
  j["time"] = t.time;
  j["mode"] = to_string(t.mode);
  j["gear"] = std::string(1, gear_letter(t.gear));
  j["speed"] = t.speed;
  j["throttle"] = t.throttle;
  j["steering"] = t.steering;
  j["encoder_ticks"] = {t.encoder_ticks[0], t.encoder_ticks[1]};
  j["encoder_angles"] = {t.encoder_angles[0], t.encoder_angles[1]};
  j["ips"] = to_array(t.ips);
  OrderedJson imu;
  imu["quat"] = to_array(t.imu.orientation.coeffs());  // x, y, z, w
  imu["euler"] = to_array(t.imu.euler);
  imu["ang_vel"] = to_array(t.imu.angular_velocity);
  imu["lin_acc"] = to_array(t.imu.linear_acceleration);
  j["imu"] = std::move(imu);
  OrderedJson lidar;
  lidar["ranges"] = t.lidar.ranges;
  lidar["intensities"] = t.lidar.intensities;
  j["lidar"] = std::move(lidar);
  OrderedJson lamps;
  lamps["headlights"] = static_cast<int>(t.lamps.headlights);
  lamps["indicators"] = static_cast<int>(t.lamps.indicators);
  lamps["taillight"] = static_cast<int>(t.lamps.taillight);
  lamps["reverse"] = t.lamps.reverse_on;
  j["lamps"] = std::move(lamps);
  j["scene_light"] = t.scene_light;
  return j.dump();
}

Telemetry decode_telemetry(std::string_view text) {
  const Json doc = parse(text);
  if (type_of(doc) != "telemetry") {
    throw ProtocolError("not a telemetry frame");
  }
  Telemetry t;
  t.time = number(require(doc, "time"), "time");
  const Json& mode = require(doc, "mode");
  if (mode == "manual") {
    t.mode = DrivingMode::kManual;
  } else if (mode == "autonomous") {
    t.mode = DrivingMode::kAutonomous;
  } else {
    throw ProtocolError("unknown mode");
  }
  const Json& gear = require(doc, "gear");
  if (gear == "D") {
    t.gear = Gear::kDrive;
  } else if (gear == "R") {
    t.gear = Gear::kReverse;
  } else {
    throw ProtocolError("unknown gear");
  }
  t.speed = number(require(doc, "speed"), "speed");
  t.throttle = number(require(doc, "throttle"), "throttle");
  t.steering = number(require(doc, "steering"), "steering");
  const Json& ticks = require(doc, "encoder_ticks");
  if (!ticks.is_array() || ticks.size() != 2 || !ticks[0].is_number_integer() ||
      !ticks[1].is_number_integer()) {
    throw ProtocolError("field 'encoder_ticks' must be two integers");
  }
  t.encoder_ticks = {ticks[0].get<std::int64_t>(),
                     ticks[1].get<std::int64_t>()};
  const Eigen::Vector2d angles = vec<2>(doc, "encoder_angles");
  t.encoder_angles = {angles[0], angles[1]};
  t.ips = vec<3>(doc, "ips");

  const Json& imu = require(doc, "imu");
  const Eigen::Vector4d q = vec<4>(imu, "quat");
  t.imu.orientation = Eigen::Quaterniond(q[3], q[0], q[1], q[2]);
  t.imu.euler = vec<3>(imu, "euler");
  t.imu.angular_velocity = vec<3>(imu, "ang_vel");
  t.imu.linear_acceleration = vec<3>(imu, "lin_acc");

  const Json& lidar = require(doc, "lidar");
  const Json& ranges = require(lidar, "ranges");
  const Json& intensities = require(lidar, "intensities");
  if (!ranges.is_array() || ranges.size() != kLidarRays ||
      !intensities.is_array() || intensities.size() != kLidarRays) {
    throw ProtocolError("lidar arrays must hold 360 values");
  }
  for (int i = 0; i < kLidarRays; ++i) {
    t.lidar.ranges[i] = number(ranges[i], "ranges");
    t.lidar.intensities[i] = number(intensities[i], "intensities");
  }

  const Json& lamps = require(doc, "lamps");
  t.lamps.headlights =
      enum_field<Headlights>(require(lamps, "headlights"), "headlights", 2);
  t.lamps.indicators =
      enum_field<Indicators>(require(lamps, "indicators"), "indicators", 3);
  t.lamps.taillight =
      enum_field<Taillight>(require(lamps, "taillight"), "taillight", 2);
  const Json& reverse = require(lamps, "reverse");
  if (!reverse.is_boolean()) throw ProtocolError("'reverse' must be boolean");
  t.lamps.reverse_on = reverse.get<bool>();
  t.lamps.blink_phase_on = blink_phase(t.time);
  const Json& scene = require(doc, "scene_light");
  if (!scene.is_boolean()) throw ProtocolError("'scene_light' must be boolean");
  t.scene_light = scene.get<bool>();
  return t;
}

InboundMessage decode_inbound(std::string_view text) {
  const Json doc = parse(text);
  const std::string type = type_of(doc);
  if (type == "command") {
    CommandMessage msg;
    double throttle = 0.0;
    double steering = 0.0;
    if (const auto it = doc.find("throttle"); it != doc.end()) {
      throttle = number(*it, "throttle");
    }
    if (const auto it = doc.find("steering"); it != doc.end()) {
      steering = number(*it, "steering");
    }
    msg.command = ActuatorCommand(throttle, steering);
    if (const auto it = doc.find("headlights"); it != doc.end()) {
      msg.lamps.headlights = enum_field<Headlights>(*it, "headlights", 2);
    }
    if (const auto it = doc.find("indicators"); it != doc.end()) {
      msg.lamps.indicators = enum_field<Indicators>(*it, "indicators", 3);
    }
    if (const auto it = doc.find("source"); it != doc.end()) {
      if (*it == "manual") {
        msg.source = CommandSource::kManual;
      } else if (*it == "autonomous") {
        msg.source = CommandSource::kAutonomous;
      } else {
        throw ProtocolError("unknown command source");
      }
    }
    return msg;
  }
  if (type == "control") {
    const Json& action = require(doc, "action");
    if (!action.is_string()) throw ProtocolError("'action' must be a string");
    const auto parsed = parse_control_action(action.get<std::string>());
    if (!parsed) {
      throw ProtocolError("unknown control action '" +
                          action.get<std::string>() + "'");
    }
    return ControlMessage{*parsed};
  }
  throw ProtocolError("unexpected frame type '" + type + "'");
}

std::string encode_command(const CommandMessage& msg) {
  OrderedJson j;
  j["type"] = "command";
  j["v"] = kProtocolVersion;
  j["throttle"] = msg.command.throttle();
  j["steering"] = msg.command.steering();
  if (msg.lamps.headlights) {
    j["headlights"] = static_cast<int>(*msg.lamps.headlights);
  }
  if (msg.lamps.indicators) {
    j["indicators"] = static_cast<int>(*msg.lamps.indicators);
  }
  if (msg.source == CommandSource::kManual) j["source"] = "manual";
  return j.dump();
}

std::string encode_control(ControlAction action) {
  OrderedJson j;
  j["type"] = "control";
  j["v"] = kProtocolVersion;
  j["action"] = to_string(action);
  return j.dump();
}

void dispatch(const InboundMessage& msg, Simulator& sim) {
  if (const auto* control = std::get_if<ControlMessage>(&msg)) {
    sim.apply(control->action);
    return;
  }
  const auto& command = std::get<CommandMessage>(msg);
  if (command.source == CommandSource::kManual) {
    sim.set_manual_command(command.command);
  } else {
    sim.set_autonomous_command(command.command);
  }
  if (command.lamps.headlights || command.lamps.indicators) {
    sim.request_lamps(command.lamps);
  }
}

}  // namespace minidrive::bridge
