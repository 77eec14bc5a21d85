#pragma once

// Wire format of the communication bridge. Every frame is one JSON object in
// one WebSocket text frame, tagged by "type":
//
//   telemetry  simulator -> peers, pushed at the telemetry rate
//   command    peer -> simulator, actuator and lamp request
//   control    peer -> simulator, reset / mode / scene light
//
// Telemetry keys are emitted in a fixed order and numbers use the shortest
// representation that parses back to the same double. Unknown keys are
// ignored on receipt.

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "minidrive/sensors.hpp"
#include "minidrive/simulator.hpp"

namespace minidrive::bridge {

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which driving mode a command is meant for. Teleoperation clients (the web
/// UI) tag their frames "manual"; untagged frames are autonomy commands.
enum class CommandSource { kAutonomous, kManual };

struct CommandMessage {
  ActuatorCommand command;
  LampRequest lamps;
  CommandSource source = CommandSource::kAutonomous;

  friend bool operator==(const CommandMessage&,
                         const CommandMessage&) = default;
};

struct ControlMessage {
  ControlAction action;

  friend bool operator==(const ControlMessage&,
                         const ControlMessage&) = default;
};

using InboundMessage = std::variant<CommandMessage, ControlMessage>;

std::string encode_telemetry(const Telemetry& t);
/// Inverse of encode_telemetry. Blink phase is re-derived from "time".
Telemetry decode_telemetry(std::string_view text);

/// Throws ProtocolError for malformed JSON, a missing or unknown "type", a
/// non-numeric field, or an unknown control action. Out-of-range numbers are
/// clamped.
InboundMessage decode_inbound(std::string_view text);

std::string encode_command(const CommandMessage& msg);
std::string encode_control(ControlAction action);

/// Feeds a decoded message into the simulator according to mode rules.
void dispatch(const InboundMessage& msg, Simulator& sim);

}  // namespace minidrive::bridge
